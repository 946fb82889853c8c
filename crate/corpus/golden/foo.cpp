#include "foo.h"

QProg foo(QVec q, std::vector<ClassicalCondition> c, int s)
{
    auto prog = QProg();
    auto size = q.size();
    for (int i = 0; i < size; i++) {
        if (i != s) {
            prog << CNOT(q[i], q[s]);
        }
    }
    prog << MeasureAll(q, c);
    return prog;
}
