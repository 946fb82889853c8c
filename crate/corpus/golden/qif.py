def qif_example(q, c):
    prog = QProg()
    prog.insert(Measure(q, c))
    prog_1 = QProg()
    prog_1.insert(H(q))
    prog_2 = QProg()
    prog_2.insert(X(q))
    prog.insert(create_if_prog(c, prog_1, prog_2))
    return prog
