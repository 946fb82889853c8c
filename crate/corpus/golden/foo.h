QProg foo(QVec q, std::vector<ClassicalCondition> c, int s);
