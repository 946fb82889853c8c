def foo(q, c, s):
    prog = QProg()
    size = len(q)
    for i in range(0, size):
        if i != s:
            prog.insert(CNOT(q[i], q[s]))
    prog.insert(measure_all(q, c))
    return prog
