import numpy as np
import pytest

from oracles import frozen_loss_grad, relu_masks

from simlearn.ebm import (
    Adam, EarlyStopping, NetArchitecture, ReduceOnPlateau, TrainConfig, TrainHistory,
    TrainingDiverged, energies_all, grad_nll, grad_population, init_params, load_checkpoint,
    log_partition, model_distribution, nll_loss, population_loss, save_checkpoint, train,
)
from simlearn.ebm import network, objective
from simlearn.qstate import BornDistribution, SampleSet, make_target, sample


def test_parameter_count():
    assert NetArchitecture(10).n_params == (10 * 128 + 128) + 4 * (128 * 128 + 128) + 129 == 67585


def test_init_determinism_and_zero_biases():
    arch = NetArchitecture(10)
    a, b = init_params(arch, 3), init_params(arch, 3)
    assert np.array_equal(a, b) and a.size == 67585
    assert not np.array_equal(a, init_params(arch, 4))
    assert np.all(a[network.bias_mask(arch)] == 0)
    W1 = network.unpack(arch, a)[0][0]
    assert abs(W1.std() - np.sqrt(2 / 10)) < 0.02


def test_unpack_rejects_wrong_length():
    with pytest.raises(ValueError):
        network.unpack(NetArchitecture(3), np.zeros(5))


def toy():
    arch = NetArchitecture(2, hidden_layers=1, hidden_width=2)
    theta = np.zeros(arch.n_params)
    (W1, b1), (W2, b2) = network.unpack(arch, theta)
    W1[:] = [[1, -1], [2, 0.5]]
    b1[:] = [0, 1]
    W2[:, 0] = [3, -2]
    b2[:] = 0.5
    return arch, theta


def test_energies_hand_computed():
    # x = (x0, x1): z = (x0 + 2 x1, -x0 + x1/2 + 1); E = 3 relu(z1) - 2 relu(z2) + 1/2
    arch, theta = toy()
    assert np.allclose(energies_all(arch, theta), [-1.5, 3.5, 3.5, 8.5])


def test_zero_weights_give_zero_energies():
    arch = NetArchitecture(5, hidden_width=16)
    assert np.array_equal(energies_all(arch, np.zeros(arch.n_params)), np.zeros(32))
    q = model_distribution(arch, np.zeros(arch.n_params))
    assert np.allclose(q.probs, 1 / 32)


def test_hidden_permutation_symmetry():
    arch = NetArchitecture(4, hidden_layers=2, hidden_width=6)
    theta = init_params(arch, 0)
    perm = np.random.default_rng(0).permutation(6)
    other = theta.copy()
    (W1, b1), (W2, b2), (W3, b3) = network.unpack(arch, other)
    (V1, c1), (V2, c2), (V3, c3) = network.unpack(arch, theta)
    W1[:] = V1[:, perm]
    b1[:] = c1[perm]
    W2[:] = V2[perm, :]
    assert np.allclose(energies_all(arch, theta), energies_all(arch, other))


def test_log_partition():
    assert abs(log_partition(np.zeros(1024)) - np.log(1024)) < 1e-12
    assert abs(log_partition(np.array([0.0, 800.0]))) < 1e-300 + 1e-12
    assert np.isfinite(log_partition(np.array([-700.0, 700.0])))
    rng = np.random.default_rng(0)
    E = rng.uniform(-3, 3, 200)
    assert abs(log_partition(E) - np.log(np.exp(-E).sum())) < 1e-12


def test_gauge_invariance():
    arch = NetArchitecture(5, hidden_width=16)
    theta = init_params(arch, 1)
    shifted = theta.copy()
    shifted[-1] += 3.7  # output bias
    assert np.max(np.abs(model_distribution(arch, theta).probs - model_distribution(arch, shifted).probs)) < 1e-12


def test_model_distribution_normalized():
    arch = NetArchitecture(8)
    q = model_distribution(arch, init_params(arch, 5) * 3)
    assert abs(q.probs.sum() - 1) < 1e-9


def generic_point(arch, seed):
    """He weights plus small random biases.

    With all biases zero every pre-activation of the all-zeros bitstring sits
    exactly on the ReLU kink, where the loss has no gradient at all.
    """
    theta = init_params(arch, seed)
    mask = network.bias_mask(arch)
    theta[mask] = 0.1 * np.random.default_rng(seed + 1000).standard_normal(mask.sum())
    return theta


def random_data(n, seed, n_s=3000):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(2 ** n))
    return SampleSet(n, rng.multinomial(n_s, p))


def test_nll_matches_per_sample_oracle():
    arch = NetArchitecture(6, hidden_width=32)
    theta = init_params(arch, 2)
    data = random_data(6, 0)
    E = network.forward(arch, theta, network.bit_table(6))
    logq = -E - np.log(np.exp(-E).sum())
    per_sample = -np.mean([logq[x] for x in data.expand()])
    assert abs(nll_loss(arch, theta, data) - per_sample) < 1e-10


def test_nll_uniform_model_and_perfect_fit():
    arch = NetArchitecture(10, hidden_width=8)
    assert abs(nll_loss(arch, np.zeros(arch.n_params), random_data(10, 1)) - np.log(1024)) < 1e-12
    # near-delta model on x* = 5: energy -M on x*, 0 elsewhere via the output bias trick
    arch = NetArchitecture(3, hidden_layers=1, hidden_width=3)
    theta = np.zeros(arch.n_params)
    (W1, b1), (W2, b2) = network.unpack(arch, theta)
    # unit fires only on 101: z = x0 - x1 + x2 - 1
    W1[:, 0] = [1, -1, 1]
    b1[0] = -1
    data = SampleSet(3, np.eye(8, dtype=int)[5] * 10)
    losses = []
    for M in (2, 5, 10, 20):
        W2[0, 0] = -M
        losses.append(nll_loss(arch, theta, data))
    # exact value log(1 + 7 exp(-M))
    assert all(a > b > 0 for a, b in zip(losses, losses[1:]))
    assert np.allclose(losses, np.log1p(7 * np.exp(-np.array([2, 5, 10, 20]))), rtol=1e-6)


def test_population_loss_modes():
    arch = NetArchitecture(10, hidden_width=8)
    assert abs(population_loss(arch, np.zeros(arch.n_params)) - np.log(1024)) < 1e-12
    arch = NetArchitecture(5, hidden_width=16)
    theta = init_params(arch, 7)
    E = network.forward(arch, theta, network.bit_table(5))
    q = np.exp(-E) / np.exp(-E).sum()
    assert abs(population_loss(arch, theta) - np.mean(-np.log(q))) < 1e-10
    target = BornDistribution(5, np.random.default_rng(0).dirichlet(np.ones(32)))
    assert abs(population_loss(arch, theta, "born", target) - np.sum(target.probs * -np.log(q))) < 1e-10
    qd = BornDistribution(5, q)
    assert abs(population_loss(arch, theta, "born", qd) - np.sum(-q * np.log(q))) < 1e-10
    with pytest.raises(ValueError):
        population_loss(arch, theta, "born")


def test_grad_nll_finite_differences_small():
    # at N=4 no ReLU kink lies within the step, so the plain loss can be differenced
    arch = NetArchitecture(4)
    theta = generic_point(arch, 4)
    data = random_data(4, 4, n_s=5000)
    g = grad_nll(arch, theta, data)
    rng = np.random.default_rng(0)
    eps = 1e-4
    for _ in range(10):
        v = rng.standard_normal(theta.size)
        v /= np.linalg.norm(v)
        fd = (nll_loss(arch, theta + eps * v, data) - nll_loss(arch, theta - eps * v, data)) / (2 * eps)
        assert abs(fd - g @ v) <= 1e-5 * abs(g @ v)


@pytest.mark.parametrize("n", [6, 10])
def test_grad_nll_frozen_pattern_finite_differences(n):
    arch = NetArchitecture(n)
    theta = generic_point(arch, n)
    data = random_data(n, n, n_s=5000)
    w = data.counts / data.total
    g = grad_nll(arch, theta, data)
    masks = relu_masks(arch.layer_sizes, theta)
    loss, oracle_grad = frozen_loss_grad(arch.layer_sizes, theta, w, masks)
    assert abs(loss - nll_loss(arch, theta, data)) < 1e-10
    assert np.allclose(g, oracle_grad, rtol=0, atol=1e-12)
    rng = np.random.default_rng(0)
    eps = 1e-4
    for _ in range(10):
        v = rng.standard_normal(theta.size)
        v /= np.linalg.norm(v)
        fd = (frozen_loss_grad(arch.layer_sizes, theta + eps * v, w, masks)[0]
              - frozen_loss_grad(arch.layer_sizes, theta - eps * v, w, masks)[0]) / (2 * eps)
        assert abs(fd - g @ v) <= 1e-5 * abs(g @ v)


def test_grad_population_finite_differences():
    arch = NetArchitecture(6)
    theta = generic_point(arch, 1)
    target = BornDistribution(6, np.random.default_rng(1).dirichlet(np.ones(64)))
    rng = np.random.default_rng(1)
    eps = 1e-4
    for weighting in ("uniform", "born"):
        g = grad_population(arch, theta, weighting, target)
        for _ in range(10):
            v = rng.standard_normal(theta.size)
            v /= np.linalg.norm(v)
            fd = (population_loss(arch, theta + eps * v, weighting, target)
                  - population_loss(arch, theta - eps * v, weighting, target)) / (2 * eps)
            assert abs(fd - g @ v) <= 1e-5 * abs(g @ v)


def test_stationarity_when_data_matches_model():
    arch = NetArchitecture(6)
    theta = init_params(arch, 3)
    q = model_distribution(arch, theta).probs
    _, g = objective.loss_and_grad(arch, theta, q)
    assert np.max(np.abs(g)) <= 1e-8
    # exactly representable case: zero network, uniform counts
    zero = np.zeros(arch.n_params)
    assert np.max(np.abs(grad_nll(arch, zero, SampleSet(6, np.full(64, 7))))) <= 1e-8


def test_output_bias_gradient_vanishes():
    arch = NetArchitecture(5)
    g = grad_nll(arch, init_params(arch, 0), random_data(5, 2))
    assert abs(g[-1]) < 1e-12


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_non_finite_energies_raise():
    arch = NetArchitecture(3, hidden_width=4)
    theta = np.full(arch.n_params, np.inf)
    with pytest.raises(objective.NonFiniteError):
        energies_all(arch, theta)


# ---- optimizers --------------------------------------------------------------

def test_adam_zero_gradient_keeps_params():
    x = np.arange(5.0)
    opt = Adam(x, lr=1e-3)
    for _ in range(10):
        opt.step(np.zeros(5))
    assert np.array_equal(x, np.arange(5.0))


def test_adam_first_step_is_lr_sized():
    x = np.zeros(4)
    g = np.array([3.0, -0.2, 1e-3, 0.0])
    Adam(x, lr=1e-4).step(g)
    assert np.allclose(x[:3], -1e-4 * np.sign(g[:3]), rtol=1e-4)
    assert x[3] == 0


def test_adam_quadratic_bowl_decreases():
    A = np.diag([1.0, 5.0, 20.0])
    x = np.array([1.0, -2.0, 0.5])
    opt = Adam(x, lr=1e-4)
    losses = []
    for _ in range(2000):
        losses.append(0.5 * x @ A @ x)
        opt.step(A @ x)
    assert all(b < a for a, b in zip(losses, losses[1:]))


def test_scheduler_examples():
    s = ReduceOnPlateau(1e-4)
    assert all(s.step(10.0 - i) == 1e-4 for i in range(30))
    s = ReduceOnPlateau(1e-4)
    lrs = [s.step(1.0) for _ in range(12)]
    assert lrs[4] == 1e-4 and lrs[5] == 5e-5
    assert lrs[10] == 2.5e-5 and lrs[11] == 2.5e-5
    assert s.n_reductions == 2


def test_scheduler_counter_resets_on_improvement():
    s = ReduceOnPlateau(1.0, patience=3)
    for loss in (5, 5, 5, 4, 4, 4):
        s.step(loss)
    assert s.lr == 1.0
    s.step(4)
    assert s.lr == 0.5


def test_early_stopping_rule():
    e = EarlyStopping(5)
    flags = [e.step(2.0) for _ in range(6)]
    assert flags == [False] * 5 + [True]


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0)
    with pytest.raises(ValueError):
        TrainConfig(scheduler_patience=0)
    with pytest.raises(ValueError):
        TrainConfig.from_dict({"nope": 1})
    assert TrainConfig.from_dict(TrainConfig(epochs=3).to_dict()) == TrainConfig(epochs=3)


# ---- training ----------------------------------------------------------------

def test_train_learns_delta_target():
    n = 4
    target = BornDistribution.delta(n, 11)
    data = sample(target, 10_000, seed=0)
    theta, hist = train(data, target, TrainConfig(epochs=200, seed=1), init_seed=2)
    assert hist.tv[-1] < 0.01
    assert hist.epochs_run == 200 and len(hist.lr) == len(hist.tv) == 200


def test_early_stop_on_frozen_loss():
    # zero network on uniform counts: the gradient is exactly zero, so the loss never moves
    n = 3
    arch = NetArchitecture(n, hidden_layers=2, hidden_width=4)
    data = SampleSet(n, np.full(8, 10))
    cfg = TrainConfig(epochs=50, batch_size=None, early_stop_patience=5)
    theta, hist = train(data, BornDistribution.uniform(n), cfg, init_seed=0, arch=arch,
                        params=np.zeros(arch.n_params))
    assert hist.epochs_run == 6 and hist.stopped_early
    assert len(set(hist.nll)) == 1


def test_train_deterministic():
    target = make_target("mps", 4, 2, seed=0)
    data = sample(target.dist, 2000, seed=1)
    arch = NetArchitecture(4, hidden_width=16)
    cfg = TrainConfig(epochs=3, batch_size=256, seed=5)
    a = train(data, target.dist, cfg, init_seed=1, arch=arch)
    b = train(data, target.dist, cfg, init_seed=1, arch=arch)
    assert np.array_equal(a[0], b[0]) and a[1].nll == b[1].nll


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_is_reported():
    target = make_target("mps", 3, 2, seed=0)
    data = sample(target.dist, 100, seed=1)
    arch = NetArchitecture(3, hidden_width=4)
    with pytest.raises(TrainingDiverged, match="epoch 1"):
        train(data, target.dist, TrainConfig(epochs=2), init_seed=0, arch=arch,
              params=np.full(arch.n_params, 1e300))


def test_train_rejects_mismatched_data():
    data = SampleSet(3, np.ones(8, dtype=int))
    with pytest.raises(ValueError):
        train(data, None, TrainConfig(epochs=1), init_seed=0, arch=NetArchitecture(4))


def test_checkpoint_round_trip(tmp_path):
    arch = NetArchitecture(4, hidden_width=8)
    theta = init_params(arch, 0) + 1e-17
    hist = TrainHistory([1.0, 0.5], [1e-4, 1e-4], [0.3, 0.2])
    cfg = TrainConfig(epochs=2)
    save_checkpoint(tmp_path / "c.json", arch, theta, cfg, hist, {"init": 0})
    ck = load_checkpoint(tmp_path / "c.json")
    assert np.array_equal(ck["theta"], theta)
    assert ck["arch"] == arch and ck["config"] == cfg and ck["history"].nll == [1.0, 0.5]
    hist.write_csv(tmp_path / "h.csv")
    lines = (tmp_path / "h.csv").read_text().splitlines()
    assert lines[0] == "epoch,nll,lr,tv" and len(lines) == 3
