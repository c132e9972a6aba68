# Solver tests package
