#include "QPanda.h"
using namespace QPanda;

QProg Bell(QVec q, std::vector<ClassicalCondition> c);
