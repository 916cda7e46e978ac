"""Opcodes shared by the compiler and both kernels.

Concept programs are flat lists of 4-int records ``(code, x, y, z)``; record
``i`` writes register ``i``. Role slot ``2*r`` is role ``r``, ``2*r + 1`` its inverse.
"""
# concept ops
ATOM = 0       # x = concept index
NATOM = 1      # x = concept index
NOT = 2        # x = register
AND = 3        # x, y = registers
OR = 4
SOME = 5       # x = role slot, y = register
ALL = 6
ATLEAST = 7    # x = count, y = role slot, z = register
ATMOST = 8

# constraints, also 4-int records
C_GLOBAL = 0   # x = register, must hold at every element
C_SUBSUMED = 1  # x, y = registers, x implies y at every element
C_MEMBER = 2   # x = register, y = term
C_EDGE = 3     # x = role slot, y, z = terms
C_NEQ = 4      # x, y = terms
C_EQ = 5       # x, y = terms

# query atoms; negative terms are variables (-1 - index)
Q_CONCEPT = 0  # x = register, y = term
Q_ROLE = 1     # x = role slot, y, z = terms

# kernel modes
FIND = 0
COMPARE = 1
PRESERVE = 2
