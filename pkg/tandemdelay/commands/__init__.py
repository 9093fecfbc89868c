"""
Command-line entry points: the tandemdelay command and the test runner.

"""
