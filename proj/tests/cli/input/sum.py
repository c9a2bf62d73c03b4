def sum(a, b):
    a = a + b
    return a
