"""Random subspace optimization: how many directions does a target need?

Training is restricted to theta = theta0 + P @ phi with a fixed random
D x d matrix P. Sweeping d on an easy and a harder target shows the
subspace dimension at which each becomes learnable.
"""
from simlearn.ebm import NetArchitecture, TrainConfig, init_params
from simlearn.probes import make_projection, rso_train
from simlearn.qstate import make_target, sample

N = 6
arch = NetArchitecture(N, hidden_layers=2, hidden_width=32)
theta0 = init_params(arch, 0)
D = arch.n_params
print(f"full dimension D={D}")

for chi in (2, 8):
    target = make_target("mps", N, chi, 4)
    data = sample(target.dist, 20_000, 5)
    row = []
    for d in (5, 20, 80, 320):
        proj = make_projection(D, d, None, theta0, seed=6)
        # steps in a d-dim subspace are scaled up so each parameter moves about as far as in full training
        cfg = TrainConfig(learning_rate=3e-3 * (D / d) ** 0.5, epochs=40, seed=7)
        res = rso_train(target.dist, data, proj, cfg, arch=arch)
        row.append(f"d={d}: {res.tv:.3f}")
    print(f"chi={chi}  TV after 40 epochs  " + "  ".join(row))
