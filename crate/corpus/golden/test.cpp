#include "test.h"

QProg Test(Qubit* q, ClassicalCondition c, ClassicalCondition temp)
{
    auto prog = QProg();
    prog << (temp = 0);
    prog << H(q);
    prog << Measure(q, c);
    auto prog_1 = QProg();
    prog_1 << (temp = temp + 1);
    prog_1 << H(q);
    prog_1 << Measure(q, c);
    prog << CreateWhileProg(c, prog_1);
    return prog;
}

from pyqpanda import *
init()
q0 = qAlloc()
c = cAlloc()
temp = cAlloc()

result = direcly_run(Test(q0,c,temp))
print(temp.eval())
print(result)

finalize()
