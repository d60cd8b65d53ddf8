"""Independent reference computations backing the test suite.

Every function recomputes a quantity through a route different from the
package implementation: cofactor inversion instead of numpy solves, a
banded boundary-value solve instead of a closed-form kernel, quadrature
diagonalization of the continuum step kernel instead of lattice
compression, the hand-expanded three-pairing sum instead of the recursive
moment evaluator, and exact rational rank instead of an SVD threshold.
Tests freeze values produced here and compare package output against them.
"""
import numpy as np
from scipy.linalg import solve_banded


# -- explicit 4x4 inversion ---------------------------------------------------

def _det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def adjugate_inverse_4x4(A):
    """Inverse via cofactor expansion; no numpy.linalg involved."""
    A = [[float(A[i][j]) for j in range(4)] for i in range(4)]
    cof = [[0.0] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            minor = [
                [A[r][c] for c in range(4) if c != j]
                for r in range(4) if r != i
            ]
            cof[i][j] = (-1.0) ** (i + j) * _det3(minor)
    det = sum(A[0][j] * cof[0][j] for j in range(4))
    return np.array([[cof[j][i] / det for j in range(4)] for i in range(4)])


def free_field_4x4_oracle(mass, spacing):
    """Covariance of the 4-site pinned-boundary field by hand.

    The quadratic form is spacing * sum over sites of
    ((x_{j+1}-x_j)/spacing)^2 contributions plus mass^2 x_j^2, with the
    field held at zero just outside the grid; its matrix is tridiagonal
    with diagonal 2/spacing^2 + mass^2 and off-diagonal -1/spacing^2,
    all scaled by spacing.  Inverted by the cofactor formula.
    """
    h = float(spacing)
    d = 2.0 / h**2 + mass**2
    o = -1.0 / h**2
    K = [[0.0] * 4 for _ in range(4)]
    for j in range(4):
        K[j][j] = h * d
        if j + 1 < 4:
            K[j][j + 1] = h * o
            K[j + 1][j] = h * o
    return adjugate_inverse_4x4(K)


# -- boundary-value Green's function solver -----------------------------------

def greens_function_value(mass, t, s, half_width=20.0, n_grid=16001):
    """Solve (-u'' + mass^2 u) = delta_s on a fine grid, return u(t).

    Finite differences on [-half_width, half_width] with zero far ends;
    second-order accurate, so it validates the closed-form kernel
    exp(-mass|t-s|)/(2 mass) to a few parts in 1e6 at these settings.
    """
    grid = np.linspace(-half_width, half_width, n_grid)
    dx = grid[1] - grid[0]
    n = n_grid - 2  # interior points
    ab = np.zeros((3, n))
    ab[0, 1:] = -1.0 / dx**2
    ab[1, :] = 2.0 / dx**2 + mass**2
    ab[2, :-1] = -1.0 / dx**2
    rhs = np.zeros(n)
    js = int(np.argmin(np.abs(grid[1:-1] - s)))
    rhs[js] = 1.0 / dx
    u = solve_banded((1, 1), ab, rhs)
    jt = int(np.argmin(np.abs(grid[1:-1] - t)))
    return float(u[jt])


# -- continuum step-kernel spectrum -------------------------------------------

def mehler_spectrum_oracle(mass, step, n_levels, n_quad=240, width_sigmas=10.0):
    """Excitation energies of the continuum one-step kernel by quadrature.

    The stationary process with covariance exp(-mass|t-s|)/(2 mass) steps
    by the transition density N(rho x, sigma^2 (1 - rho^2)), rho =
    exp(-mass step), sigma^2 = 1/(2 mass).  Reversibility makes
    sqrt(pi(x)) p(x,y) / sqrt(pi(y)) symmetric; diagonalizing it on a
    Gauss-Legendre grid gives the step eigenvalues, and
    -log(eigenvalue)/step gives energies.  Returns the first n_levels
    gaps above the ground level.
    """
    sigma2 = 1.0 / (2.0 * mass)
    rho = np.exp(-mass * step)
    s2 = sigma2 * (1.0 - rho**2)
    L = width_sigmas * np.sqrt(sigma2)
    nodes, weights = np.polynomial.legendre.leggauss(n_quad)
    x = L * nodes
    w = L * weights

    def log_pi(v):
        return -v**2 / (2.0 * sigma2) - 0.5 * np.log(2.0 * np.pi * sigma2)

    X, Y = np.meshgrid(x, x, indexing="ij")
    log_p = -((Y - rho * X) ** 2) / (2.0 * s2) - 0.5 * np.log(2.0 * np.pi * s2)
    K = np.exp(0.5 * log_pi(X) + log_p - 0.5 * log_pi(Y))
    M = np.sqrt(w)[:, None] * K * np.sqrt(w)[None, :]
    eig = np.linalg.eigvalsh(0.5 * (M + M.T))[::-1]
    energies = -np.log(eig[: n_levels + 1]) / step
    return energies[1:] - energies[0]


# -- hand-expanded Gaussian moments -------------------------------------------

def four_point_wick(C, i, j, k, l):
    """The three-pairing sum, written out."""
    return C[i, j] * C[k, l] + C[i, k] * C[j, l] + C[i, l] * C[j, k]


def two_point_wick(C, i, j):
    return C[i, j]


def six_point_wick(C, idx):
    """All 15 pairings of six indices, enumerated explicitly."""
    a, b, c, d, e, f = idx
    pairings = [
        ((a, b), (c, d), (e, f)), ((a, b), (c, e), (d, f)), ((a, b), (c, f), (d, e)),
        ((a, c), (b, d), (e, f)), ((a, c), (b, e), (d, f)), ((a, c), (b, f), (d, e)),
        ((a, d), (b, c), (e, f)), ((a, d), (b, e), (c, f)), ((a, d), (b, f), (c, e)),
        ((a, e), (b, c), (d, f)), ((a, e), (b, d), (c, f)), ((a, e), (b, f), (c, d)),
        ((a, f), (b, c), (d, e)), ((a, f), (b, d), (c, e)), ((a, f), (b, e), (c, d)),
    ]
    return sum(C[p][q] * C[r][s] * C[t, u] for (p, q), (r, s), (t, u) in pairings)


def moment_with_source_1d(sigma2, s, degree):
    """E[x^degree exp(i s x)] for x ~ N(0, sigma2), degree <= 2, closed form."""
    damp = np.exp(-0.5 * s**2 * sigma2)
    if degree == 0:
        return damp
    if degree == 1:
        return 1j * s * sigma2 * damp
    if degree == 2:
        return (sigma2 - s**2 * sigma2**2) * damp
    raise ValueError("closed form written out only through degree 2")


# -- reversible cross-block factorization -------------------------------------

def cross_block_rank_one_defect(covariance, times):
    """Largest deviation of C(-t, s) from phi(t) phi(s) over positive times.

    For a reversible simple Markov chain the mirrored block factors
    through the innermost positive site; phi is read off the first row
    and column, so any genuine rank-two remainder shows up here.
    """
    times = np.asarray(times)
    pos = np.where(times > 0)[0]
    neg = len(times) - 1 - pos  # mirrored indices under exact reflection
    B = covariance[np.ix_(neg, pos)]
    phi_sq = B[0, 0]
    if phi_sq <= 0:
        return float("inf")
    outer = np.outer(B[:, 0], B[0, :]) / phi_sq
    return float(np.max(np.abs(B - outer)))


# -- exact commutant dimension ------------------------------------------------

def commutant_dimension_exact(matrices):
    """Kernel dimension of the stacked commutator system over the rationals.

    Entries must be exactly representable (integers or small dyadics);
    sympy's rank is exact, so there is no threshold to tune.
    """
    import sympy as sp

    def kron(A, B):
        n, m = A.shape
        p, q = B.shape
        out = sp.zeros(n * p, m * q)
        for i in range(n):
            for j in range(m):
                for k in range(p):
                    for l in range(q):
                        out[i * p + k, j * q + l] = A[i, j] * B[k, l]
        return out

    mats = [sp.Matrix([[sp.nsimplify(v, rational=True) for v in row]
                       for row in np.asarray(M)]) for M in matrices]
    d = mats[0].shape[0]
    eye = sp.eye(d)
    blocks = [kron(M.T, eye) - kron(eye, M) for M in mats]
    stacked = sp.Matrix.vstack(*blocks)
    return d * d - stacked.rank()


# -- structure constants from 2x2 commutators ---------------------------------

def sl2_structure_from_matrices():
    """Structure constants of the traceless 2x2 algebra from raw commutators.

    Basis (H, E, F) as matrices; brackets are computed as AB - BA and
    expanded in the basis by solving the 3-coefficient linear system
    entrywise (the basis is triangular in the entries, so coefficients
    read off directly).
    """
    H = np.array([[1.0, 0.0], [0.0, -1.0]])
    E = np.array([[0.0, 1.0], [0.0, 0.0]])
    F = np.array([[0.0, 0.0], [1.0, 0.0]])
    basis = [H, E, F]

    def expand(M):
        # coefficients: a H + b E + c F has entries [[a, b], [c, -a]]
        return np.array([M[0, 0], M[0, 1], M[1, 0]])

    c = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            c[i, j] = expand(basis[i] @ basis[j] - basis[j] @ basis[i])
    return c
