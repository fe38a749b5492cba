//! Criterion benchmarks for the quadrature and the solver.
