"""
The tandemdelay test suite.

"""
