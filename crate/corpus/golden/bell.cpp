#include "QPanda.h"
using namespace QPanda;

#include "bell.h"

QProg Bell(QVec q, std::vector<ClassicalCondition> c)
{
    auto prog = QProg();
    prog << H(q[0]);
    prog << CNOT(q[0], q[1]);
    prog << MeasureAll(q, c);
    return prog;
}
