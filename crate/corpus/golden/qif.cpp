#include "qif.h"

QProg qif_example(Qubit* q, ClassicalCondition c)
{
    auto prog = QProg();
    prog << Measure(q, c);
    auto prog_1 = QProg();
    prog_1 << H(q);
    auto prog_2 = QProg();
    prog_2 << X(q);
    prog << CreateIfProg(c, prog_1, prog_2);
    return prog;
}
