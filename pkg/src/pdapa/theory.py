"""Mean and mean-square performance predictions.

Error vectors follow the convention ``w~ = w* - w``. Second-order
quantities live in ``bvec`` coordinates of ``NL x NL`` matrices with
``L x L`` blocks; see :mod:`pdapa.blockalg`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blockalg import block_kron, bvec, to_bvec_operator, unbvec
from .selection import Scheme, moment_table
from .signals import NodeSignalModel, sample_blocks
from .topology import WeightMatrices

DEFAULT_SAMPLES = 20_000
THEORY_SEED_OFFSET = 0x5EED
DEFAULT_NL_CAP = 48


class TheoryError(RuntimeError):
    pass


class TheoryCapExceeded(TheoryError):
    pass


class UnstableModel(TheoryError):
    pass


# -- data moments -----------------------------------------------------------


@dataclass
class DataMoments:
    """Per-node expectations of the projection data.

    ``Zbar[k] = E[U^T (eps I + U U^T)^{-1} U]``, ``ZkZ[k] = E[Z (x) Z]``
    and ``WtW[k] = E[W^T (x) W^T]`` with ``W = (eps I + U U^T)^{-1} U``.
    """

    Zbar: np.ndarray
    ZkZ: np.ndarray
    WtW: np.ndarray

    @property
    def N(self) -> int:
        return self.Zbar.shape[0]

    @property
    def L(self) -> int:
        return self.Zbar.shape[1]


def block_moments(U: np.ndarray, epsilon: float):
    """Sample averages of ``Z``, ``Z (x) Z`` and ``W^T (x) W^T`` over blocks ``U`` of shape ``(S, P, L)``."""
    S, P, L = U.shape
    G = np.einsum("spl,sql->spq", U, U) + epsilon * np.eye(P)
    W = np.linalg.solve(G, U)
    Z = np.einsum("spl,spm->slm", U, W)
    Zbar = Z.mean(axis=0)
    ZkZ = np.einsum("sab,scd->acbd", Z, Z).reshape(L * L, L * L) / S
    Wt = np.swapaxes(W, 1, 2)
    WtW = np.einsum("sab,scd->acbd", Wt, Wt).reshape(L * L, P * P) / S
    return 0.5 * (Zbar + Zbar.T), ZkZ, WtW


def estimate_moments(models, P: int, epsilon: float, L: int, samples: int = DEFAULT_SAMPLES, seed=0) -> DataMoments:
    """Monte-Carlo data moments for every node from independent stationary blocks."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(len(models))]
    Zb, ZZ, WW = [], [], []
    batch = 4096
    for model, rng in zip(models, rngs):
        acc = [0.0, 0.0, 0.0]
        done = 0
        while done < samples:
            # full batches keep smaller sample counts a prefix of larger ones
            count = min(batch, samples - done)
            U = sample_blocks(model, P, L, batch, rng)[:count]
            for i, m in enumerate(block_moments(U, epsilon)):
                acc[i] = acc[i] + m * count
            done += count
        Zb.append(acc[0] / samples)
        ZZ.append(acc[1] / samples)
        WW.append(acc[2] / samples)
    return DataMoments(np.array(Zb), np.array(ZZ), np.array(WW))


def estimate_Zbar(models, P, epsilon, L, samples=DEFAULT_SAMPLES, seed=0):
    """Per-node ``Zbar_k`` and their block-diagonal stack."""
    dm = estimate_moments(models, P, epsilon, L, samples, seed)
    return dm.Zbar, blockdiag(dm.Zbar)


def blockdiag(blocks) -> np.ndarray:
    blocks = np.asarray(blocks)
    n, L, _ = blocks.shape
    out = np.zeros((n * L, n * L))
    for k in range(n):
        out[k * L : (k + 1) * L, k * L : (k + 1) * L] = blocks[k]
    return out


def zkronz_operator(dm: DataMoments) -> np.ndarray:
    """``E[Z(n) (x)_b Z(n)]`` with nodes treated as independent."""
    N, L = dm.N, dm.L
    L2 = L * L
    out = np.zeros((N * N * L2, N * N * L2))
    for j in range(N):
        for i in range(N):
            seg = (i + j * N) * L2
            # bvec block (i, j) maps through vec(Z_i S Z_j) = (Z_j (x) Z_i) vec(S)
            blk = dm.ZkZ[i] if i == j else np.kron(dm.Zbar[j], dm.Zbar[i])
            out[seg : seg + L2, seg : seg + L2] = blk
    return out


def estimate_ZkronZ(models, P, epsilon, L, samples=DEFAULT_SAMPLES, seed=0) -> np.ndarray:
    return zkronz_operator(estimate_moments(models, P, epsilon, L, samples, seed))


def noise_covariance(dm: DataMoments, noise_var) -> np.ndarray:
    """Block-diagonal ``E[W^T Lambda_v W]`` built from ``E[W^T (x) W^T] vec(Lambda_v)``."""
    L = dm.L
    P = int(round(np.sqrt(dm.WtW.shape[2])))
    blocks = []
    for k, s2 in enumerate(noise_var):
        lam = s2 * np.eye(P)
        y = dm.WtW[k] @ lam.reshape(-1, order="F")
        blocks.append(y.reshape(L, L, order="F"))
    return blockdiag(blocks)


# -- mask-driven network matrices -------------------------------------------


@dataclass(frozen=True)
class MaskAffine:
    """``X(n) = X0 (x) I_L + sum_{l, r} s_{r,l}(n) C[l] (x) E_rr``.

    Describes network matrices that are affine in the selection bits, with
    the node index as the outer Kronecker factor.
    """

    X0: np.ndarray
    C: np.ndarray

    def full(self) -> np.ndarray:
        return self.X0 + self.C.sum(axis=0)

    def transpose(self) -> MaskAffine:
        return MaskAffine(self.X0.T, np.swapaxes(self.C, 1, 2))

    def realize(self, S: np.ndarray) -> np.ndarray:
        """Network matrix for masks ``S`` of shape ``(N, L)``."""
        N, L = S.shape
        out = np.kron(self.X0, np.eye(L))
        for l in range(N):
            out += np.kron(self.C[l], np.diag(S[l].astype(float)))
        return out


def combination_model(A: np.ndarray) -> MaskAffine:
    """``B(n)``: block ``(i, j)`` is ``a_ji S_j``; diagonal is ``I - sum_l a_li S_l``."""
    N = A.shape[0]
    C = np.zeros((N, N, N))
    for l in range(N):
        for i in range(N):
            if i != l and A[l, i] != 0:
                C[l, i, l] += A[l, i]
                C[l, i, i] -= A[l, i]
    return MaskAffine(np.eye(N), C)


def regularization_model(P: np.ndarray) -> MaskAffine:
    """``Q_M(n)``: block ``(i, j)`` is ``rho_ij S_j``; diagonal is ``-sum_l rho_il S_l``."""
    N = P.shape[0]
    C = np.zeros((N, N, N))
    for l in range(N):
        for i in range(N):
            if i != l and P[i, l] != 0:
                C[l, i, l] += P[i, l]
                C[l, i, i] -= P[i, l]
    return MaskAffine(np.zeros((N, N)), C)


def stacked_mask_model(N: int) -> MaskAffine:
    """``S^T(n)`` where ``S(n) = 1_N (x) [S_1(n), ..., S_N(n)]``."""
    C = np.zeros((N, N, N))
    for l in range(N):
        C[l, l, :] = 1.0
    return MaskAffine(np.zeros((N, N)), C)


def expected_kron(X: MaskAffine, Y: MaskAffine, table: np.ndarray, L: int) -> np.ndarray:
    """``E[X(n) (x)_b Y(n)]`` from the selection cross-moment table.

    ``table[same_node, same_entry]`` holds ``E[s_{r,i} s_{s,j}]``. The
    expansion is exact for masks whose moments depend only on those two
    pair classes.
    """
    N = X.X0.shape[0]
    I_L = np.eye(L)
    p = table[1, 1]
    E = np.zeros((L, L, L))
    E[np.arange(L), np.arange(L), np.arange(L)] = 1.0

    X0 = np.kron(X.X0, I_L)
    Y0 = np.kron(Y.X0, I_L)
    Xs = [np.kron(c, I_L) for c in X.C]
    Ys = [np.kron(c, I_L) for c in Y.C]
    X1 = sum(Xs)
    Y1 = sum(Ys)
    Cx, Cy = X.C.sum(axis=0), Y.C.sum(axis=0)

    t_all = np.kron(X1, Y1)
    t_sn = sum(np.kron(a, b) for a, b in zip(Xs, Ys))
    t_se = sum(np.kron(np.kron(Cx, E[r]), np.kron(Cy, E[r])) for r in range(L))
    t_both = sum(np.kron(np.kron(X.C[l], E[r]), np.kron(Y.C[l], E[r])) for l in range(N) for r in range(L))

    m00, m01 = table[0, 0], table[0, 1]
    m10, m11 = table[1, 0], table[1, 1]
    K = (
        np.kron(X0, Y0)
        + p * (np.kron(X1, Y0) + np.kron(X0, Y1))
        + m00 * (t_all - t_sn - t_se + t_both)
        + m10 * (t_sn - t_both)
        + m01 * (t_se - t_both)
        + m11 * t_both
    )
    return to_bvec_operator(K, N * L, L)


def omega_s(N: int, L: int, scheme, M: int) -> np.ndarray:
    """``E[S^T(n) (x)_b S^T(n)]`` for the stacked selection matrix."""
    T = stacked_mask_model(N)
    return expected_kron(T, T, moment_table(scheme, M, L), L)


# -- global model -----------------------------------------------------------


@dataclass
class GlobalModel:
    """Network-level matrices of the error recursion."""

    N: int
    L: int
    p: float
    D: np.ndarray
    Eta: np.ndarray
    Acal: np.ndarray
    Pcal: np.ndarray
    Q: np.ndarray
    Zbar: np.ndarray
    w_star: np.ndarray
    B_model: MaskAffine = field(repr=False)
    Q_model: MaskAffine = field(repr=False)

    @property
    def Qbar(self) -> np.ndarray:
        return self.p * self.Q

    @property
    def Bbar(self) -> np.ndarray:
        NL = self.N * self.L
        return self.p * self.Acal.T + (1.0 - self.p) * np.eye(NL)


def build_global_model(weights: WeightMatrices, w_star: np.ndarray, Zbar_blocks, M: int, L: int) -> GlobalModel:
    """Assemble ``D, eta, A (x) I, P (x) I, Q, Zbar`` and the stacked optimum.

    ``Q`` subtracts each node's regularization row sum, so nodes without
    out-of-cluster neighbors get a zero block row.
    """
    N = weights.N
    I_L = np.eye(L)
    Pcal = np.kron(weights.P, I_L)
    Q = Pcal - np.kron(np.diag(weights.P.sum(axis=1)), I_L)
    return GlobalModel(
        N=N,
        L=L,
        p=M / L,
        D=np.kron(np.diag(weights.mu), I_L),
        Eta=np.kron(np.diag(weights.eta), I_L),
        Acal=np.kron(weights.A, I_L),
        Pcal=Pcal,
        Q=Q,
        Zbar=blockdiag(Zbar_blocks),
        w_star=np.asarray(w_star, dtype=float).reshape(-1),
        B_model=combination_model(weights.A),
        Q_model=regularization_model(weights.P),
    )


def mean_step_bound(Zbar_blocks, eta, p: float) -> float:
    """Sufficient step size bound ``2 / (max_k lambda_max(Zbar_k) + 2 eta p)``."""
    lam = max(np.linalg.eigvalsh(z)[-1] for z in Zbar_blocks)
    return 2.0 / (lam + 2.0 * float(np.max(eta)) * p)


def spectral_radius(X: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(X))))


@dataclass
class MeanResult:
    trajectory: np.ndarray
    bias: np.ndarray
    spectral_radius: float


def mean_matrices(gm: GlobalModel):
    """Transition matrix and constant drive of the mean error recursion."""
    NL = gm.N * gm.L
    Bb = gm.Bbar
    T = Bb @ (np.eye(NL) - gm.D @ gm.Zbar + gm.D @ gm.Eta @ gm.Qbar)
    c = Bb @ gm.D @ gm.Eta @ gm.Qbar @ gm.w_star
    return T, c


def mean_recursion(gm: GlobalModel, n_steps: int) -> MeanResult:
    """Iterate ``E[w~(n+1)] = T E[w~(n)] - c`` from ``E[w~(0)] = w*``.

    ``trajectory`` has ``n_steps + 1`` rows. ``bias`` is the fixed point
    from a direct linear solve.
    """
    T, c = mean_matrices(gm)
    rho = spectral_radius(T)
    if rho >= 1.0:
        raise UnstableModel(f"mean recursion unstable: spectral radius {rho:.6g}")
    traj = np.empty((n_steps + 1, T.shape[0]))
    traj[0] = gm.w_star
    for n in range(n_steps):
        traj[n + 1] = T @ traj[n] - c
    bias = np.linalg.solve(T - np.eye(T.shape[0]), c)
    return MeanResult(traj, bias, rho)


# -- mean-square model ------------------------------------------------------


@dataclass
class VarianceModel:
    """Quantities of the weighted variance recursion.

    ``Phi = E[B^T (x)_b B^T]``, ``Phi_t = E[B (x)_b B]``,
    ``Upsilon = E[Q_M^T (x)_b Q_M^T]`` and ``Q2 = E[Q_M (x)_b Q_M]``.
    """

    F: np.ndarray
    gamma: np.ndarray
    r_b: np.ndarray
    Phi: np.ndarray
    Phi_t: np.ndarray
    Upsilon: np.ndarray
    Q2: np.ndarray
    EZZ: np.ndarray


def selection_moments(gm: GlobalModel, scheme, M: int):
    """``(Phi, Phi_t, Upsilon, Q2)`` for a selection scheme.

    The periodic scheme uses the closed forms in which every cross-moment
    equals ``p``; the random schemes use the exact moment expansion.
    """
    scheme = Scheme(scheme)
    L, p = gm.L, gm.p
    NL = gm.N * L
    if scheme is Scheme.PERIODIC:
        I2 = np.eye(NL * NL)
        Phi = (1 - p) * I2 + p * block_kron(gm.Acal, gm.Acal, L)
        Phi_t = (1 - p) * I2 + p * block_kron(gm.Acal.T, gm.Acal.T, L)
        Ups = p * block_kron(gm.Q.T, gm.Q.T, L)
        Q2 = p * block_kron(gm.Q, gm.Q, L)
        return Phi, Phi_t, Ups, Q2
    table = moment_table(scheme, M, L)
    Bt = gm.B_model.transpose()
    Qt = gm.Q_model.transpose()
    Phi = expected_kron(Bt, Bt, table, L)
    Phi_t = expected_kron(gm.B_model, gm.B_model, table, L)
    Ups = expected_kron(Qt, Qt, table, L)
    Q2 = expected_kron(gm.Q_model, gm.Q_model, table, L)
    return Phi, Phi_t, Ups, Q2


def _scale_cols(X: np.ndarray, d: np.ndarray) -> np.ndarray:
    return X * d[None, :]


def build_F(gm: GlobalModel, EZZ: np.ndarray, Phi: np.ndarray, Upsilon: np.ndarray) -> np.ndarray:
    """Mean-square transition matrix acting on ``bvec`` weighting vectors.

    The bracket collects the expanded ``E[G^T Sigma G]`` terms; pairs such
    as ``(Zbar (x)_b I)(D (x)_b I)`` are merged by the mixed-product rule.
    """
    L = gm.L
    NL = gm.N * L
    I = np.eye(NL)
    ZD = gm.Zbar @ gm.D
    QED = gm.Qbar.T @ gm.Eta @ gm.D
    dd = np.diag(block_kron(gm.D, gm.D, L))
    eedd = np.diag(block_kron(gm.Eta @ gm.D, gm.Eta @ gm.D, L))
    bracket = (
        np.eye(NL * NL)
        - block_kron(ZD, I, L)
        + block_kron(QED, I, L)
        - block_kron(I, ZD, L)
        + _scale_cols(EZZ, dd)
        - block_kron(QED, ZD, L)
        + block_kron(I, QED, L)
        - block_kron(ZD, QED, L)
        + _scale_cols(Upsilon, eedd)
    )
    return bracket @ Phi


def noise_vector(gm: GlobalModel, Phi_t: np.ndarray, dm: DataMoments, noise_var) -> np.ndarray:
    """``gamma = E[B (x)_b B] (D (x)_b D) bvec(E[W^T Lambda_v W])``."""
    Y = noise_covariance(dm, noise_var)
    return Phi_t @ bvec(gm.D @ Y @ gm.D, gm.L)


def bias_vector(gm: GlobalModel, Phi_t: np.ndarray, Q2: np.ndarray) -> np.ndarray:
    """``r_b = E[B (x)_b B] (D eta (x)_b D eta) E[Q_M (x)_b Q_M] bvec(w* w*^T)``."""
    L = gm.L
    ws = gm.w_star
    inner = Q2 @ bvec(np.outer(ws, ws), L)
    DE = gm.D @ gm.Eta
    return Phi_t @ bvec(DE @ unbvec(inner, L) @ DE, L)


def alpha_vectors(gm: GlobalModel, Phi_t: np.ndarray, Q2: np.ndarray, mean_err: np.ndarray):
    """Cross-term vectors ``(alpha_1, alpha_2)`` for the mean error ``E[w~(n)]``.

    ``alpha_1 = bvec(E[r w~^T G^T])`` and ``alpha_2 = bvec(E[G w~ r^T])``,
    each expanded into its three bracketed terms.
    """
    L = gm.L
    DE = gm.D @ gm.Eta
    DEQ = DE @ gm.Qbar
    DZ = gm.D @ gm.Zbar
    ws = gm.w_star
    m = np.asarray(mean_err)

    def inner(left_vec, right_vec, left_first):
        # bvec of E[(I - DZ + DEQ_M) a b^T (DEQ_M)^T] or its transpose
        X = np.outer(left_vec, right_vec)
        quad = unbvec(Q2 @ bvec(X, L), L)
        if left_first:
            return X @ DEQ.T - DZ @ X @ DEQ.T + DE @ quad @ DE
        return DEQ @ X - DEQ @ X @ DZ.T + DE @ quad @ DE

    a2 = Phi_t @ bvec(inner(m, ws, True), L)
    a1 = Phi_t @ bvec(inner(ws, m, False), L)
    return a1, a2


def build_variance_model(gm: GlobalModel, dm: DataMoments, noise_var, scheme, M: int) -> VarianceModel:
    Phi, Phi_t, Ups, Q2 = selection_moments(gm, scheme, M)
    EZZ = zkronz_operator(dm)
    F = build_F(gm, EZZ, Phi, Ups)
    gamma = noise_vector(gm, Phi_t, dm, noise_var)
    r_b = bias_vector(gm, Phi_t, Q2)
    return VarianceModel(F, gamma, r_b, Phi, Phi_t, Ups, Q2, EZZ)


def msd_weighting(gm: GlobalModel, normalized: bool = False) -> np.ndarray:
    """``bvec`` of ``(1/N) I``, or of the per-node ``1/(N |w*_k|^2)`` weighting giving NMSD."""
    NL = gm.N * gm.L
    if not normalized:
        return bvec(np.eye(NL) / gm.N, gm.L)
    norms = (gm.w_star.reshape(gm.N, gm.L) ** 2).sum(axis=1)
    return bvec(np.kron(np.diag(1.0 / (gm.N * norms)), np.eye(gm.L)), gm.L)


def transient_msd(gm: GlobalModel, vm: VarianceModel, T: int, sigma=None) -> np.ndarray:
    """Predicted ``E|w~(n)|^2_sigma`` for ``n = 0..T-1``.

    Runs the weighted-variance recursion with the running correction
    ``Gamma(n+1) = Gamma(n) F + (alpha_1(n) + alpha_2(n))^T (F - I)``.
    """
    if sigma is None:
        sigma = msd_weighting(gm)
    L = gm.L
    F = vm.F
    k0 = bvec(np.outer(gm.w_star, gm.w_star), L)
    Tm, c = mean_matrices(gm)
    m = gm.w_star.copy()
    out = np.empty(T)
    x = float(k0 @ sigma)
    t = np.array(sigma, dtype=float)
    Gam = np.zeros_like(t)
    drive = vm.gamma - k0 + vm.r_b
    for n in range(T):
        out[n] = x
        if n == T - 1:
            break
        a1, a2 = alpha_vectors(gm, vm.Phi_t, vm.Q2, m)
        a = a1 + a2
        Ft = F @ t
        x = x + drive @ t + k0 @ Ft - a @ sigma - Gam @ sigma
        Gam = Gam @ F + (a @ F - a)
        t = Ft
        m = Tm @ m - c
    return out


def covariance_msd(gm: GlobalModel, vm: VarianceModel, T: int, sigma=None) -> np.ndarray:
    """Same prediction as :func:`transient_msd`, by propagating ``bvec(E[w~ w~^T])``."""
    if sigma is None:
        sigma = msd_weighting(gm)
    L = gm.L
    k = bvec(np.outer(gm.w_star, gm.w_star), L)
    Tm, c = mean_matrices(gm)
    m = gm.w_star.copy()
    Ft = vm.F.T
    out = np.empty(T)
    for n in range(T):
        out[n] = k @ sigma
        a1, a2 = alpha_vectors(gm, vm.Phi_t, vm.Q2, m)
        k = Ft @ k + vm.gamma + vm.r_b - a1 - a2
        m = Tm @ m - c
    return out


def steady_state_msd(gm: GlobalModel, vm: VarianceModel, sigma=None) -> float:
    """Limit of the weighted MSD, solving ``(I - F) x = sigma``."""
    if sigma is None:
        sigma = msd_weighting(gm)
    n = vm.F.shape[0]
    bias = mean_recursion(gm, 0).bias
    a1, a2 = alpha_vectors(gm, vm.Phi_t, vm.Q2, bias)
    try:
        x = np.linalg.solve(np.eye(n) - vm.F, sigma)
    except np.linalg.LinAlgError as exc:
        raise UnstableModel("I - F is singular") from exc
    return float((vm.gamma + vm.r_b - a1 - a2) @ x)


def to_db(x, floor_db: float = -200.0):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(np.maximum(x, 0.0))
    return np.maximum(out, floor_db)


# -- convenience wrapper ----------------------------------------------------


@dataclass
class TheoryReport:
    mu_max: float
    spectral_radius_F: float
    spectral_radius_mean: float
    msd_transient: np.ndarray
    msd_steady: float
    bias: np.ndarray
    stable: bool

    @property
    def msd_steady_db(self) -> float:
        return float(to_db(self.msd_steady))

    def to_json(self) -> dict:
        return {
            "mu_max": self.mu_max,
            "spectral_radius_F": self.spectral_radius_F,
            "spectral_radius_mean": self.spectral_radius_mean,
            "stable": self.stable,
            "msd_transient": [float(v) for v in self.msd_transient],
            "msd_steady_db": self.msd_steady_db if self.stable else None,
        }


def predict(
    weights: WeightMatrices,
    w_star: np.ndarray,
    models: list[NodeSignalModel],
    P: int,
    M: int,
    scheme,
    T: int,
    samples: int = DEFAULT_SAMPLES,
    seed=0,
    normalized: bool = False,
    nl_cap: int = DEFAULT_NL_CAP,
) -> TheoryReport:
    """Full theory pipeline for one configuration.

    ``w_star`` is the ``(N, L)`` array of node optima. Data moments are
    estimated with a seed derived from ``seed``.
    """
    w_star = np.asarray(w_star, dtype=float)
    N, L = w_star.shape
    if N * L > nl_cap:
        raise TheoryCapExceeded(f"N*L = {N * L} exceeds the theory cap of {nl_cap}")
    dm = estimate_moments(models, P, weights.epsilon, L, samples, seed=[THEORY_SEED_OFFSET, seed])
    gm = build_global_model(weights, w_star, dm.Zbar, M, L)
    mu_max = mean_step_bound(dm.Zbar, weights.eta, gm.p)
    vm = build_variance_model(gm, dm, [m.noise_var for m in models], scheme, M)
    rho_F = spectral_radius(vm.F)
    Tm, _ = mean_matrices(gm)
    rho_m = spectral_radius(Tm)
    stable = rho_F < 1.0 and rho_m < 1.0
    sigma = msd_weighting(gm, normalized)
    if stable:
        curve = transient_msd(gm, vm, T, sigma)
        steady = steady_state_msd(gm, vm, sigma)
        bias = mean_recursion(gm, 0).bias
    else:
        curve = np.full(T, np.inf)
        steady = float("inf")
        bias = np.full(N * L, np.nan)
    return TheoryReport(mu_max, rho_F, rho_m, curve, steady, bias, stable)
