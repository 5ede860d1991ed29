"""Recurrent cells (RNN, LSTM, GRU) with exact backpropagation through time.

Everything is plain numpy on float64.  One scalar feature per timestep; the
final hidden state feeds a small dense head (GRU adds an intermediate dense
layer with a leaky-rectifier activation).  Recurrences:

    rnn:   h_t = tanh(x_t W_x + h_{t-1} W_h + b)

    lstm:  i,f,o = sigmoid(x_t W_x* + h_{t-1} W_h* + b*)
           g     = tanh(...)
           C_t   = f . C_{t-1} + i . g
           h_t   = o . tanh(C_t)

    gru:   z, r  = sigmoid(x_t W_x* + h_{t-1} W_h* + b*)
           hcand = tanh(x_t W_xc + (r . h_{t-1}) W_hc + b_c)
           h_t   = (1 - z) . h_{t-1} + z . hcand

Gate weights are stored stacked along the unit axis -- LSTM gate order is
(i, f, g, o), GRU gate order (z, r) -- with each gate slice initialized as
its own fan-in/fan-out Glorot-uniform draw and zero biases.  Backward
passes accumulate per-step gate gradients into one array and reduce the
weight gradients with a single einsum at the end, which keeps the per-step
work to one matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit as sigmoid

KINDS = ("rnn", "lstm", "gru")
LEAKY_SLOPE = 0.3


@dataclass
class RecurrentModel:
    kind: str
    hidden_units: int
    sequence_length: int
    output_days: int
    dense_units: int | None
    dropout_rate: float
    params: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")


def _param_layout(kind: str, hidden: int, dense: int | None,
                  output: int) -> list[tuple[str, int, int, tuple[int, ...]]]:
    """(name, fan_in, fan_out, shape) per tensor; fans refer to one gate slice."""
    if kind == "rnn":
        layout = [("w_x", 1, hidden, (1, hidden)),
                  ("w_h", hidden, hidden, (hidden, hidden)),
                  ("b", 0, 0, (hidden,))]
    elif kind == "lstm":
        layout = [("w_x", 1, hidden, (1, 4 * hidden)),
                  ("w_h", hidden, hidden, (hidden, 4 * hidden)),
                  ("b", 0, 0, (4 * hidden,))]
    else:
        layout = [("w_xg", 1, hidden, (1, 2 * hidden)),
                  ("w_hg", hidden, hidden, (hidden, 2 * hidden)),
                  ("b_g", 0, 0, (2 * hidden,)),
                  ("w_xc", 1, hidden, (1, hidden)),
                  ("w_hc", hidden, hidden, (hidden, hidden)),
                  ("b_c", 0, 0, (hidden,))]
    if dense is not None:
        layout += [("w_d", hidden, dense, (hidden, dense)),
                   ("b_d", 0, 0, (dense,)),
                   ("w_o", dense, output, (dense, output)),
                   ("b_o", 0, 0, (output,))]
    else:
        layout += [("w_o", hidden, output, (hidden, output)),
                   ("b_o", 0, 0, (output,))]
    return layout


def init_model(kind: str, *, hidden_units: int, sequence_length: int,
               output_days: int, dense_units: int | None,
               dropout_rate: float, rng: np.random.Generator) -> RecurrentModel:
    """Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.

    Draws happen in the fixed layout order so models are reproducible from
    the generator state alone.
    """
    params: dict[str, np.ndarray] = {}
    for name, fan_in, fan_out, shape in _param_layout(kind, hidden_units,
                                                      dense_units, output_days):
        if name.startswith("b"):
            params[name] = np.zeros(shape)
        else:
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            params[name] = rng.uniform(-bound, bound, size=shape)
    return RecurrentModel(kind=kind, hidden_units=hidden_units,
                          sequence_length=sequence_length, output_days=output_days,
                          dense_units=dense_units, dropout_rate=dropout_rate,
                          params=params)


def _as_batch(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 3:
        if x.shape[2] != 1:
            raise ValueError(f"expected one feature per timestep, got shape {x.shape}")
        x = x[:, :, 0]
    elif x.ndim == 1:
        x = x[np.newaxis, :]
    elif x.ndim != 2:
        raise ValueError(f"input must have 1, 2, or 3 axes, got shape {x.shape}")
    return x


def _initial_state(h0, batch: int, hidden: int, name: str) -> np.ndarray:
    if h0 is None:
        return np.zeros((batch, hidden))
    h0 = np.asarray(h0, dtype=float)
    if h0.ndim == 1:
        h0 = np.broadcast_to(h0, (batch, hidden)).copy()
    if h0.shape != (batch, hidden):
        raise ValueError(f"{name} must have shape ({batch}, {hidden}), got {h0.shape}")
    return h0


def _check_recurrent_shapes(model: RecurrentModel) -> None:
    expected = {name: shape for name, _, _, shape in _param_layout(
        model.kind, model.hidden_units, model.dense_units, model.output_days)}
    for name, shape in expected.items():
        actual = model.params.get(name)
        if actual is None or actual.shape != shape:
            got = None if actual is None else actual.shape
            raise ValueError(f"parameter {name!r}: expected shape {shape}, got {got}")


# ---------------------------------------------------------------------------
# forward scans (return per-step caches for BPTT)


def _rnn_scan(params, x, h0):
    B, T = x.shape
    H = params["w_h"].shape[0]
    xproj = x.reshape(-1, 1) @ params["w_x"] + params["b"]
    xproj = xproj.reshape(B, T, H)
    h_prev_all = np.empty((B, T, H))
    h_all = np.empty((B, T, H))
    h = _initial_state(h0, B, H, "h0")
    w_h = params["w_h"]
    for t in range(T):
        h_prev_all[:, t] = h
        h = np.tanh(xproj[:, t] + h @ w_h)
        h_all[:, t] = h
    return {"x": x, "h_prev": h_prev_all, "h": h_all}


def _lstm_scan(params, x, h0, c0):
    B, T = x.shape
    H = params["w_h"].shape[0]
    xproj = (x.reshape(-1, 1) @ params["w_x"] + params["b"]).reshape(B, T, 4 * H)
    gates = np.empty((B, T, 4 * H))
    h_prev_all = np.empty((B, T, H))
    c_prev_all = np.empty((B, T, H))
    c_all = np.empty((B, T, H))
    tanh_c_all = np.empty((B, T, H))
    h_all = np.empty((B, T, H))
    h = _initial_state(h0, B, H, "h0")
    c = _initial_state(c0, B, H, "c0")
    w_h = params["w_h"]
    for t in range(T):
        h_prev_all[:, t] = h
        c_prev_all[:, t] = c
        a = xproj[:, t] + h @ w_h
        i = sigmoid(a[:, :H])
        f = sigmoid(a[:, H : 2 * H])
        g = np.tanh(a[:, 2 * H : 3 * H])
        o = sigmoid(a[:, 3 * H :])
        gates[:, t, :H] = i
        gates[:, t, H : 2 * H] = f
        gates[:, t, 2 * H : 3 * H] = g
        gates[:, t, 3 * H :] = o
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        c_all[:, t] = c
        tanh_c_all[:, t] = tc
        h_all[:, t] = h
    return {"x": x, "h_prev": h_prev_all, "c_prev": c_prev_all, "gates": gates,
            "c": c_all, "tanh_c": tanh_c_all, "h": h_all}


def _gru_scan(params, x, h0):
    B, T = x.shape
    H = params["w_hc"].shape[0]
    xg = (x.reshape(-1, 1) @ params["w_xg"] + params["b_g"]).reshape(B, T, 2 * H)
    xc = (x.reshape(-1, 1) @ params["w_xc"] + params["b_c"]).reshape(B, T, H)
    z_all = np.empty((B, T, H))
    r_all = np.empty((B, T, H))
    hcand_all = np.empty((B, T, H))
    rh_all = np.empty((B, T, H))
    h_prev_all = np.empty((B, T, H))
    h_all = np.empty((B, T, H))
    h = _initial_state(h0, B, H, "h0")
    w_hg, w_hc = params["w_hg"], params["w_hc"]
    for t in range(T):
        h_prev_all[:, t] = h
        ag = xg[:, t] + h @ w_hg
        z = sigmoid(ag[:, :H])
        r = sigmoid(ag[:, H:])
        rh = r * h
        hcand = np.tanh(xc[:, t] + rh @ w_hc)
        h = (1.0 - z) * h + z * hcand
        z_all[:, t] = z
        r_all[:, t] = r
        rh_all[:, t] = rh
        hcand_all[:, t] = hcand
        h_all[:, t] = h
    return {"x": x, "h_prev": h_prev_all, "z": z_all, "r": r_all,
            "rh": rh_all, "hcand": hcand_all, "h": h_all}


# ---------------------------------------------------------------------------
# head


def _head_forward(model, h_last, dropout_mask):
    d = h_last if dropout_mask is None else h_last * dropout_mask
    cache = {"d": d, "mask": dropout_mask}
    if model.dense_units is not None:
        a1 = d @ model.params["w_d"] + model.params["b_d"]
        z1 = np.where(a1 > 0, a1, LEAKY_SLOPE * a1)
        cache["a1"] = a1
        cache["z1"] = z1
        y = z1 @ model.params["w_o"] + model.params["b_o"]
    else:
        y = d @ model.params["w_o"] + model.params["b_o"]
    return y, cache


def _head_backward(model, cache, dy, grads):
    if model.dense_units is not None:
        grads["w_o"] = cache["z1"].T @ dy
        grads["b_o"] = dy.sum(axis=0)
        dz1 = dy @ model.params["w_o"].T
        da1 = dz1 * np.where(cache["a1"] > 0, 1.0, LEAKY_SLOPE)
        grads["w_d"] = cache["d"].T @ da1
        grads["b_d"] = da1.sum(axis=0)
        dd = da1 @ model.params["w_d"].T
    else:
        grads["w_o"] = cache["d"].T @ dy
        grads["b_o"] = dy.sum(axis=0)
        dd = dy @ model.params["w_o"].T
    return dd if cache["mask"] is None else dd * cache["mask"]


# ---------------------------------------------------------------------------
# public forward passes (evaluation mode, spec surfaces)


def rnn_forward(model: RecurrentModel, x, h0=None) -> tuple[np.ndarray, np.ndarray]:
    """All hidden states and the head output; dropout inactive."""
    if model.kind != "rnn":
        raise ValueError(f"model kind is {model.kind!r}, not 'rnn'")
    _check_recurrent_shapes(model)
    cache = _rnn_scan(model.params, _as_batch(x), h0)
    y, _ = _head_forward(model, cache["h"][:, -1], None)
    return cache["h"], y


def lstm_forward(model: RecurrentModel, x, h0=None,
                 c0=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hidden states, cell states, and the head output; dropout inactive."""
    if model.kind != "lstm":
        raise ValueError(f"model kind is {model.kind!r}, not 'lstm'")
    _check_recurrent_shapes(model)
    cache = _lstm_scan(model.params, _as_batch(x), h0, c0)
    y, _ = _head_forward(model, cache["h"][:, -1], None)
    return cache["h"], cache["c"], y


def gru_forward(model: RecurrentModel, x, h0=None) -> tuple[np.ndarray, np.ndarray]:
    """All hidden states and the head output; dropout inactive."""
    if model.kind != "gru":
        raise ValueError(f"model kind is {model.kind!r}, not 'gru'")
    _check_recurrent_shapes(model)
    cache = _gru_scan(model.params, _as_batch(x), h0)
    y, _ = _head_forward(model, cache["h"][:, -1], None)
    return cache["h"], y


def forward(model: RecurrentModel, x, dropout_mask=None) -> tuple[np.ndarray, dict]:
    """Training-path forward: returns head output and the BPTT cache."""
    _check_recurrent_shapes(model)
    xb = _as_batch(x)
    if model.kind == "rnn":
        cache = _rnn_scan(model.params, xb, None)
    elif model.kind == "lstm":
        cache = _lstm_scan(model.params, xb, None, None)
    else:
        cache = _gru_scan(model.params, xb, None)
    y, head_cache = _head_forward(model, cache["h"][:, -1], dropout_mask)
    cache["head"] = head_cache
    return y, cache


# ---------------------------------------------------------------------------
# backward passes


def _rnn_backward(params, cache, dh_last, grads):
    x, h_prev, h = cache["x"], cache["h_prev"], cache["h"]
    B, T, H = h.shape
    da_all = np.empty((B, T, H))
    dh = dh_last
    w_h_t = params["w_h"].T
    for t in range(T - 1, -1, -1):
        da = dh * (1.0 - h[:, t] ** 2)
        da_all[:, t] = da
        dh = da @ w_h_t
    grads["w_x"] = np.einsum("bt,bth->h", x, da_all)[np.newaxis, :]
    grads["w_h"] = np.einsum("bth,btg->hg", h_prev, da_all)
    grads["b"] = da_all.sum(axis=(0, 1))


def _lstm_backward(params, cache, dh_last, grads):
    x, h_prev, c_prev = cache["x"], cache["h_prev"], cache["c_prev"]
    gates, tanh_c = cache["gates"], cache["tanh_c"]
    B, T, H = h_prev.shape
    da_all = np.empty((B, T, 4 * H))
    dh = dh_last
    dc = np.zeros((B, H))
    w_h_t = params["w_h"].T
    for t in range(T - 1, -1, -1):
        i = gates[:, t, :H]
        f = gates[:, t, H : 2 * H]
        g = gates[:, t, 2 * H : 3 * H]
        o = gates[:, t, 3 * H :]
        tc = tanh_c[:, t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc**2)
        da_all[:, t, :H] = (dc * g) * i * (1.0 - i)
        da_all[:, t, H : 2 * H] = (dc * c_prev[:, t]) * f * (1.0 - f)
        da_all[:, t, 2 * H : 3 * H] = (dc * i) * (1.0 - g**2)
        da_all[:, t, 3 * H :] = do * o * (1.0 - o)
        dh = da_all[:, t] @ w_h_t
        dc = dc * f
    grads["w_x"] = np.einsum("bt,btg->g", x, da_all)[np.newaxis, :]
    grads["w_h"] = np.einsum("bth,btg->hg", h_prev, da_all)
    grads["b"] = da_all.sum(axis=(0, 1))


def _gru_backward(params, cache, dh_last, grads):
    x, h_prev = cache["x"], cache["h_prev"]
    z_all, r_all, rh_all, hcand_all = cache["z"], cache["r"], cache["rh"], cache["hcand"]
    B, T, H = h_prev.shape
    da_g_all = np.empty((B, T, 2 * H))
    da_c_all = np.empty((B, T, H))
    dh = dh_last
    w_hc_t = params["w_hc"].T
    w_hg_t = params["w_hg"].T
    for t in range(T - 1, -1, -1):
        z = z_all[:, t]
        r = r_all[:, t]
        hc = hcand_all[:, t]
        hp = h_prev[:, t]
        dz = dh * (hc - hp)
        da_c = (dh * z) * (1.0 - hc**2)
        da_c_all[:, t] = da_c
        dh_prev = dh * (1.0 - z)
        d_rh = da_c @ w_hc_t
        dr = d_rh * hp
        dh_prev += d_rh * r
        da_g_all[:, t, :H] = dz * z * (1.0 - z)
        da_g_all[:, t, H:] = dr * r * (1.0 - r)
        dh = dh_prev + da_g_all[:, t] @ w_hg_t
    grads["w_xg"] = np.einsum("bt,btg->g", x, da_g_all)[np.newaxis, :]
    grads["w_hg"] = np.einsum("bth,btg->hg", h_prev, da_g_all)
    grads["b_g"] = da_g_all.sum(axis=(0, 1))
    grads["w_xc"] = np.einsum("bt,bth->h", x, da_c_all)[np.newaxis, :]
    grads["w_hc"] = np.einsum("bth,btg->hg", rh_all, da_c_all)
    grads["b_c"] = da_c_all.sum(axis=(0, 1))


def backward(model: RecurrentModel, cache: dict, dy: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients of every parameter given d(loss)/d(head output)."""
    grads: dict[str, np.ndarray] = {}
    dh_last = _head_backward(model, cache["head"], dy, grads)
    if model.kind == "rnn":
        _rnn_backward(model.params, cache, dh_last, grads)
    elif model.kind == "lstm":
        _lstm_backward(model.params, cache, dh_last, grads)
    else:
        _gru_backward(model.params, cache, dh_last, grads)
    return grads


def backprop(model: RecurrentModel, inputs, targets, *, dropout_mask=None,
             loss_scale: float = 1.0) -> tuple[float, dict[str, np.ndarray]]:
    """Mean-squared-error loss and its exact gradients over a batch.

    The loss is loss_scale * mean((y - target)^2) over every output element,
    differentiated through the full unrolled sequence.
    """
    targets = np.asarray(targets, dtype=float)
    if targets.ndim == 1:
        targets = targets[np.newaxis, :]
    if targets.shape[0] == 0:
        raise ValueError("batch must be nonempty")
    y, cache = forward(model, inputs, dropout_mask)
    if y.shape != targets.shape:
        raise ValueError(f"targets shape {targets.shape} does not match output {y.shape}")
    err = y - targets
    loss = loss_scale * float(np.mean(err**2))
    dy = (2.0 * loss_scale / err.size) * err
    return loss, backward(model, cache, dy)
