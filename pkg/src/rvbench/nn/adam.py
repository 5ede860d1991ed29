"""Adam optimizer over a dict of named parameter arrays."""

from __future__ import annotations

import math

import numpy as np


class Adam:
    """First/second-moment adaptive updates with bias correction.

    Uses the efficient formulation with the corrected step size

        lr_t = lr * sqrt(1 - beta2^t) / (1 - beta1^t)
        p   -= lr_t * m / (sqrt(v) + epsilon)

    so a first step with gradient g moves by ~ -lr * sign(g) for |g| well
    above epsilon.  Updates are in-place and fully deterministic.
    """

    def __init__(self, params: dict[str, np.ndarray], learning_rate: float = 1e-4,
                 beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        self.params = params
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.t = 0
        self.m = {name: np.zeros_like(p) for name, p in params.items()}
        self.v = {name: np.zeros_like(p) for name, p in params.items()}

    def step(self, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        lr_t = (self.learning_rate
                * math.sqrt(1.0 - self.beta2**self.t) / (1.0 - self.beta1**self.t))
        for name, g in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            self.params[name] -= lr_t * m / (np.sqrt(v) + self.epsilon)
