import numpy as np
import pytest

from fas_swipt.channel import AntennaLayout, ChannelGeometry, PathAngles, Region

_ACCEPTANCE_LINES = []


def random_geometry(rng, L_t=6, L_r=5, full=True):
    """Random geometry with dense (non-diagonal) path-response matrices."""

    def angles(L):
        return PathAngles(rng.uniform(0, np.pi, L), rng.uniform(0, np.pi, L))

    def sigma():
        s = rng.standard_normal((L_r, L_t)) + 1j * rng.standard_normal((L_r, L_t))
        return s if full else np.diag(np.diag(s))

    return ChannelGeometry(angles(L_t), angles(L_r), angles(L_r), sigma(), sigma(), rng.uniform(-1, 1, 2))


def random_psd(rng, N, P=1.0, rank=None):
    rank = N if rank is None else rank
    X = rng.standard_normal((N, rank)) + 1j * rng.standard_normal((N, rank))
    Q = X @ X.conj().T
    return P * Q / np.trace(Q).real


def random_layout(rng, N, C_t: Region, C_r: Region, D):
    pts = []
    while len(pts) < N:
        p = rng.uniform(C_t.lower, C_t.upper)
        if all(np.linalg.norm(p - q) >= D for q in pts):
            pts.append(p)
    return AntennaLayout(np.array(pts), rng.uniform(C_r.lower, C_r.upper))


def fd_gradient(f, p, h=1e-6):
    p = np.asarray(p, dtype=float)
    g = np.zeros(2)
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        g[k] = (f(p + e) - f(p - e)) / (2 * h)
    return g


def fd_hessian(f, p, h=1e-4):
    p = np.asarray(p, dtype=float)
    H = np.zeros((2, 2))
    f0 = f(p)
    for i in range(2):
        for j in range(2):
            ei = np.zeros(2)
            ej = np.zeros(2)
            ei[i] = h
            ej[j] = h
            if i == j:
                H[i, i] = (f(p + ei) - 2 * f0 + f(p - ei)) / h**2
            else:
                H[i, j] = (f(p + ei + ej) - f(p + ei - ej) - f(p - ei + ej) + f(p - ei - ej)) / (4 * h**2)
    return (H + H.T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture
def report():
    """Records one PASS/FAIL line per acceptance criterion."""

    def _report(name, ok, detail=""):
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
        print(_ACCEPTANCE_LINES[-1])
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def qcqp_instance(seed, grad_scale=None):
    """Realistic per-antenna surrogate and constraint set with a binding SINR disk.

    ``grad_scale`` enlarges the objective gradient so the unconstrained step
    leaves the feasible set; drawn at random when omitted.
    """
    from fas_swipt.experiments import generate_channel
    from fas_swipt.tx_position import build_B, build_C, constraint_set, sinr_surrogate_constraint, tx_surrogates
    from fas_swipt.channel import ir_channel

    rng = np.random.default_rng(seed)
    geom = generate_channel(seed, 14)
    C_t = Region.square(3.0)
    lay = random_layout(rng, 4, C_t, C_t, 0.5)
    n = int(rng.integers(4))
    B, C = build_B(lay.r, geom), build_C(geom)
    s = tx_surrogates(lay.t[n], B, C, geom)
    others = np.delete(ir_channel(lay.t, geom), n)
    proxy_now = s.z_i + np.vdot(others, others).real
    P, sigma2 = 20.0, 1.0
    gamma = proxy_now * rng.uniform(0.5, 0.99) * P / sigma2
    disk = sinr_surrogate_constraint(s, others, gamma, sigma2, P)
    cons = constraint_set(n, lay.t, s, C_t, 0.5, disk)
    scale = rng.uniform(1, 60) if grad_scale is None else grad_scale
    s.grad_B = s.grad_B * scale
    return s, cons, dict(geom=geom, layout=lay, n=n, B=B, C=C, others=others, gamma=gamma, P=P, sigma2=sigma2)
