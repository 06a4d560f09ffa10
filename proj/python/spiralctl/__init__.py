"""Python access to the spiralctl core (extremals, blow-up, Floquet spectrum)."""

from ._spiralctl import (
    A0,
    SQRT5,
    DomainError,
    Error,
    NumericError,
    TransformNotConstant,
    a_constants,
    analyze_matrix,
    blow_down,
    blow_up,
    char_poly,
    cycle_state,
    eigenvalues,
    ham_rhs,
    hamiltonian,
    m_rate,
    paper_char_poly,
    paper_eigenvalues,
    paper_J,
    pendulum_system_matrix,
    pi_residual,
    reconstruct_J,
    simulate,
    spiral_state,
    verify,
)

__all__ = [
    "A0",
    "SQRT5",
    "DomainError",
    "Error",
    "NumericError",
    "TransformNotConstant",
    "a_constants",
    "analyze_matrix",
    "blow_down",
    "blow_up",
    "char_poly",
    "cycle_state",
    "eigenvalues",
    "ham_rhs",
    "hamiltonian",
    "m_rate",
    "paper_char_poly",
    "paper_eigenvalues",
    "paper_J",
    "pendulum_system_matrix",
    "pi_residual",
    "reconstruct_J",
    "simulate",
    "spiral_state",
    "verify",
]
