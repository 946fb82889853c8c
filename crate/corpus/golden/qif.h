QProg qif_example(Qubit* q, ClassicalCondition c);
