QProg Test(Qubit* q, ClassicalCondition c, ClassicalCondition temp);
