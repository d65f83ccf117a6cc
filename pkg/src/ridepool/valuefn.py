"""Per-vehicle value-function approximation and temporal-difference training.

One small feed-forward network (tanh hidden layers, linear output) is
shared by all vehicles: the fleet is homogeneous, so weight sharing speeds
up learning without losing the per-vehicle decomposition. The network maps
a 7-dimensional post-decision state summary to a scalar value estimate;
the joint value of a fleet state is the sum of the per-vehicle values.

Training follows the standard one-step bootstrap: the target for a stored
transition is the next epoch's collected reward plus the discounted value
of the next post-decision state under a periodically refreshed frozen copy
of the network. Everything is float64 numpy, which keeps the analytic
gradients checkable against finite differences to tight tolerances.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

FEATURE_DIM = 7
FEATURE_NAMES = (
    "loc_x", "loc_y", "time_of_day", "free_capacity",
    "onboard_count", "plan_slack", "plan_length",
)


class TrainingError(RuntimeError):
    """Raised when a training step produces non-finite gradients."""


@dataclass(frozen=True)
class StateFeatures:
    """Post-decision vehicle summary fed to the value network.

    loc_x/loc_y: coordinates of the vehicle's next node, normalized to
    [0, 1] by the network bounding box. time_of_day: epoch index over the
    horizon. free_capacity / onboard_count: fractions of capacity.
    plan_slack: mean remaining delay headroom across active duties in
    units of the pickup delay (1.0 when idle). plan_length: remaining
    plan driving time over (2 * pickup_delay * capacity).
    """

    loc_x: float
    loc_y: float
    time_of_day: float
    free_capacity: float
    onboard_count: float
    plan_slack: float
    plan_length: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.loc_x, self.loc_y, self.time_of_day, self.free_capacity,
                self.onboard_count, self.plan_slack, self.plan_length,
            ],
            dtype=float,
        )


@dataclass(frozen=True)
class Experience:
    """One TD transition: post-state, next reward, next post-state."""

    features_post: StateFeatures
    reward_next: float
    features_post_next: StateFeatures


class ValueNet:
    """Feed-forward value approximator with its training state.

    Hidden layers use tanh; the output is linear. Weights start as small
    seeded uniform values scaled by 1/sqrt(fan_in); biases start at zero.
    """

    def __init__(
        self,
        layer_sizes=(FEATURE_DIM, 32, 32, 1),
        seed: int = 0,
        learning_rate: float = 1e-3,
        discount: float = 0.9,
        target_refresh: int = 20,
    ):
        if len(layer_sizes) < 2 or layer_sizes[-1] != 1:
            raise ValueError("layer_sizes must end in a single output unit")
        if not 0.0 <= discount < 1.0:
            raise ValueError("discount must lie in [0, 1)")
        self.layer_sizes = tuple(int(s) for s in layer_sizes)
        self.learning_rate = float(learning_rate)
        self.discount = float(discount)
        self.target_refresh = int(target_refresh)
        self.steps = 0
        rng = np.random.default_rng(seed)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.layer_sizes, self.layer_sizes[1:]):
            scale = 1.0 / math.sqrt(fan_in)
            self.weights.append(rng.uniform(-scale, scale, size=(fan_out, fan_in)))
            self.biases.append(np.zeros(fan_out))
        self._target = [(w.copy(), b.copy()) for w, b in zip(self.weights, self.biases)]

    # -- forward passes -------------------------------------------------------

    def _forward(self, x: np.ndarray, params) -> np.ndarray:
        a = x
        last = len(params) - 1
        for i, (w, b) in enumerate(params):
            z = a @ w.T + b
            a = z if i == last else np.tanh(z)
        return a[:, 0]

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Batched live-network values for an (n, dim) input array."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"expected {self.layer_sizes[0]} features, got {x.shape[1]}")
        return self._forward(x, list(zip(self.weights, self.biases)))

    def predict_target(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"expected {self.layer_sizes[0]} features, got {x.shape[1]}")
        return self._forward(x, self._target)

    # -- gradients ------------------------------------------------------------

    def loss_and_grads(self, x: np.ndarray, targets: np.ndarray):
        """Mean-squared-error loss and its gradients via backprop.

        Returns (loss, grad_weights, grad_biases) with gradients shaped like
        the corresponding parameter arrays.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        targets = np.asarray(targets, dtype=float)
        n = x.shape[0]
        activations = [x]
        zs = []
        a = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w.T + b
            zs.append(z)
            a = z if i == last else np.tanh(z)
            activations.append(a)
        pred = activations[-1][:, 0]
        resid = pred - targets
        loss = float(np.mean(resid**2))

        grad_w = [None] * len(self.weights)
        grad_b = [None] * len(self.biases)
        delta = (2.0 * resid / n)[:, None]  # dL/dz at the linear output
        for i in range(last, -1, -1):
            grad_w[i] = delta.T @ activations[i]
            grad_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i]) * (1.0 - np.tanh(zs[i - 1]) ** 2)
        return loss, grad_w, grad_b

    # -- parameter access / persistence ----------------------------------------

    def refresh_target(self) -> None:
        self._target = [(w.copy(), b.copy()) for w, b in zip(self.weights, self.biases)]

    def copy(self) -> "ValueNet":
        dup = ValueNet(
            self.layer_sizes,
            seed=0,
            learning_rate=self.learning_rate,
            discount=self.discount,
            target_refresh=self.target_refresh,
        )
        dup.weights = [w.copy() for w in self.weights]
        dup.biases = [b.copy() for b in self.biases]
        dup._target = [(w.copy(), b.copy()) for w, b in self._target]
        dup.steps = self.steps
        return dup

    def save(self, path) -> None:
        """Checkpoint to an .npz archive.

        Layout: ``version`` (int), ``layer_sizes``, ``steps``, ``hyper``
        ([learning_rate, discount, target_refresh]), then ``w{i}``/``b{i}``
        for the live network and ``tw{i}``/``tb{i}`` for the target copy.
        Float64 throughout, so a save/load round trip is lossless.
        """
        arrays = {
            "version": np.array([1]),
            "layer_sizes": np.array(self.layer_sizes),
            "steps": np.array([self.steps]),
            "hyper": np.array([self.learning_rate, self.discount, self.target_refresh]),
        }
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"w{i}"] = w
            arrays[f"b{i}"] = b
        for i, (w, b) in enumerate(self._target):
            arrays[f"tw{i}"] = w
            arrays[f"tb{i}"] = b
        np.savez(path, **arrays)

    @staticmethod
    def load(path) -> "ValueNet":
        data = np.load(path)
        if int(data["version"][0]) != 1:
            raise ValueError(f"unsupported checkpoint version {data['version'][0]}")
        sizes = tuple(int(s) for s in data["layer_sizes"])
        lr, disc, refresh = (float(v) for v in data["hyper"])
        net = ValueNet(sizes, seed=0, learning_rate=lr, discount=disc,
                       target_refresh=int(refresh))
        net.steps = int(data["steps"][0])
        net.weights = [data[f"w{i}"] for i in range(len(sizes) - 1)]
        net.biases = [data[f"b{i}"] for i in range(len(sizes) - 1)]
        net._target = [(data[f"tw{i}"], data[f"tb{i}"]) for i in range(len(sizes) - 1)]
        return net


# -- module-level operations ----------------------------------------------------


def evaluate(net: ValueNet, features: StateFeatures) -> float:
    """Scalar value estimate of one post-decision state."""
    return float(net.predict(features.as_array()[None, :])[0])


def joint_value(nets, features_list) -> float:
    """Fleet value: sum of per-vehicle evaluations.

    ``nets`` may be a single shared ValueNet or one per vehicle (parallel
    to ``features_list``).
    """
    if isinstance(nets, ValueNet):
        nets = [nets] * len(features_list)
    if len(nets) != len(features_list):
        raise ValueError("need one network per feature vector")
    return sum(evaluate(n, f) for n, f in zip(nets, features_list))


def td_train(net: ValueNet, batch, gamma: float | None = None, lr: float | None = None):
    """One gradient step toward one-step bootstrapped targets.

    Targets are ``reward_next + gamma * target_net(features_post_next)``;
    the frozen target copy is refreshed from the live network every
    ``net.target_refresh`` steps. Returns (net, mean squared TD error),
    where the error is measured before the step.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    gamma = net.discount if gamma is None else float(gamma)
    lr = net.learning_rate if lr is None else float(lr)
    x = np.stack([e.features_post.as_array() for e in batch])
    x_next = np.stack([e.features_post_next.as_array() for e in batch])
    rewards = np.array([e.reward_next for e in batch], dtype=float)
    targets = rewards if gamma == 0.0 else rewards + gamma * net.predict_target(x_next)
    loss, grad_w, grad_b = net.loss_and_grads(x, targets)
    for g in grad_w + grad_b:
        if not np.all(np.isfinite(g)):
            raise TrainingError(
                f"non-finite gradient at step {net.steps}; batch size {len(batch)}, "
                f"reward range [{rewards.min()}, {rewards.max()}]"
            )
    for w, g in zip(net.weights, grad_w):
        w -= lr * g
    for b, g in zip(net.biases, grad_b):
        b -= lr * g
    net.steps += 1
    if net.target_refresh > 0 and net.steps % net.target_refresh == 0:
        net.refresh_target()
    return net, loss


class ReplayBuffer:
    """Fixed-capacity experience store with uniform sampling."""

    def __init__(self, capacity: int = 10_000):
        self._items = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._items)

    def add(self, exp: Experience) -> None:
        self._items.append(exp)

    def sample(self, rng: np.random.Generator, k: int) -> list:
        if len(self._items) == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, len(self._items), size=min(k, len(self._items)))
        return [self._items[i] for i in idx]


def post_decision_features(
    net, vehicle, combo, plan, epoch: int, horizon: int, params
) -> StateFeatures:
    """Deterministic state summary after committing a vehicle to a plan.

    Args:
        net: the road network (for coordinate normalization).
        vehicle: the vehicle before the commitment.
        combo: the request combination being committed (may be empty).
        plan: the route that will be installed (None or empty for idle).
        epoch: current decision epoch index.
        horizon: total epochs in the run.
        params: DelayParams for slack/length normalization.
    """
    min_x, min_y, max_x, max_y = net.bounds()
    x, y = net.coord(vehicle.location)
    span_x = max(max_x - min_x, 1.0)
    span_y = max(max_y - min_y, 1.0)

    committed = vehicle.committed + len(combo)
    free_capacity = max(vehicle.capacity - committed, 0) / vehicle.capacity
    onboard_count = len(vehicle.onboard) / vehicle.capacity

    # Headroom per remaining duty, measured against the duty's own bound:
    # pickups against the pickup delay from now, drop-offs against the
    # detour budget from their in-plan pickup (or from now when the pickup
    # already happened and only the drop-off remains in the plan).
    stops = () if plan is None else plan.stops
    plan_time = 0.0 if plan is None else plan.total_time
    slack = 1.0
    if stops:
        now = max(vehicle.free_at, 0.0)
        picked = {s.index: s.arrival for s in stops if s.kind == "pickup"}
        headrooms = []
        for stop in stops:
            if stop.kind == "pickup":
                headrooms.append(params.pickup_delay - (stop.arrival - now))
            elif stop.kind == "dropoff" and stop.index in picked:
                headrooms.append(params.detour_delay - (stop.arrival - picked[stop.index]))
            else:
                headrooms.append(params.detour_delay - (stop.arrival - now))
        slack = float(np.mean(headrooms)) / params.pickup_delay
    plan_length = plan_time / (2.0 * params.pickup_delay * vehicle.capacity)

    return StateFeatures(
        loc_x=(x - min_x) / span_x,
        loc_y=(y - min_y) / span_y,
        time_of_day=epoch / max(horizon, 1),
        free_capacity=free_capacity,
        onboard_count=onboard_count,
        plan_slack=slack,
        plan_length=plan_length,
    )
