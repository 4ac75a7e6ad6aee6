"""Dense-Sparse performance predictor and its single-representation baselines"""
import copy
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple
import numpy as np
from loguru import logger
from config.logging_config import get_run_metadata
from config.settings import TrainConfig, PredictorConfig
from constants import PredictorMode, PREDICTOR_CONFIGS, DENSE_TOWER_WIDTHS
from exceptions import InvalidArgumentError, ValidationError
from models.arch_sample import ArchSample
from models.encoded_arch import EncodedArch
from models.predictor_metrics import PredictorMetrics
from models.search_space import SearchSpaceSpec
from services.bench import split_dataset
from services.search_space import default_space, encode_features


class DSPredictor:
    """
    Regression of architecture performance from its encoded genotype.

    The dense tower (64-128-dim) embeds the normalized dimension facets, the
    embedding table embeds the categorical tokens. In dense_sparse mode the
    tower output joins the token embeddings as one extra row of Z, and the
    strictly upper triangle of Z @ Z.T (row-major) plus the tower output feed
    the fused head. dense_only reads the tower output alone, sparse_only the
    mean of the token embeddings. Dropout precedes the final linear layer.
    """

    def __init__(
        self,
        mode: PredictorMode = PredictorMode.DENSE_SPARSE,
        vocab: Optional[int] = None,
        dim: int = 32,
        n_dense: int = 33,
        n_tokens: int = 22,
        dropout: float = 0.5,
        seed: int = 0
    ):
        if not 0.0 <= dropout < 1.0:
            raise InvalidArgumentError(f"Dropout must lie in [0, 1), got {dropout}")

        self.mode = PredictorMode(mode)
        config = PREDICTOR_CONFIGS[self.mode]
        self.uses_dense = config["uses_dense"]
        self.uses_sparse = config["uses_sparse"]
        self.head_widths = list(config["head_widths"])
        self.tower_widths = list(DENSE_TOWER_WIDTHS)

        self.vocab = vocab if vocab is not None else default_space().vocab_size
        self.dim = dim
        self.n_dense = n_dense
        self.n_tokens = n_tokens
        self.dropout = dropout
        self.target_mean = 0.0
        self.target_std = 1.0
        # Adam moments left by pretrain_macs, resumed by train
        self.optimizer_state: Optional[Dict] = None

        self._triu = np.triu_indices(n_tokens + 1, k=1)
        self.params: Dict[str, np.ndarray] = self._init_params(np.random.default_rng(seed))

    @classmethod
    def from_config(cls, config: PredictorConfig, seed: int = 0, space: Optional[SearchSpaceSpec] = None) -> "DSPredictor":
        space = space or default_space()
        n_stages = len(space.stages)
        return cls(
            mode=config.mode,
            vocab=space.vocab_size,
            dim=config.dim,
            n_dense=3 * n_stages,
            n_tokens=2 * n_stages,
            dropout=config.dropout,
            seed=seed
        )

    @property
    def n_interactions(self) -> int:
        return (self.n_tokens + 1) * self.n_tokens // 2

    @property
    def fused_width(self) -> int:
        if self.mode == PredictorMode.DENSE_SPARSE:
            return self.n_interactions + self.dim
        return self.dim

    def _init_params(self, rng: np.random.Generator) -> Dict[str, np.ndarray]:
        params = {}
        if self.uses_sparse:
            params["embed"] = rng.normal(0.0, 1.0 / np.sqrt(self.dim), size=(self.vocab, self.dim))
        if self.uses_dense:
            widths = [self.n_dense] + self.tower_widths + [self.dim]
            self._add_layers(params, "tower", widths, rng)
        self._add_layers(params, "head", [self.fused_width] + self.head_widths, rng)
        self._add_layers(params, "out", [self.head_widths[-1], 1], rng)
        return params

    @staticmethod
    def _add_layers(params: Dict[str, np.ndarray], prefix: str, widths: List[int], rng: np.random.Generator):
        for layer, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
            bound = 1.0 / np.sqrt(fan_in)
            params[f"{prefix}.{layer}.w"] = rng.uniform(-bound, bound, size=(fan_in, fan_out))
            params[f"{prefix}.{layer}.b"] = np.zeros(fan_out)

    def _n_layers(self, prefix: str) -> int:
        return sum(1 for name in self.params if name.startswith(prefix + ".") and name.endswith(".w"))

    def _mlp(self, x: np.ndarray, prefix: str, relu_last: bool):
        inputs, pres = [], []
        n_layers = self._n_layers(prefix)
        for layer in range(n_layers):
            inputs.append(x)
            z = x @ self.params[f"{prefix}.{layer}.w"] + self.params[f"{prefix}.{layer}.b"]
            pres.append(z)
            x = np.maximum(0.0, z) if (layer < n_layers - 1 or relu_last) else z
        return x, (inputs, pres, relu_last)

    def _mlp_backward(self, d_x: np.ndarray, prefix: str, cache, grads: Dict[str, np.ndarray]) -> np.ndarray:
        inputs, pres, relu_last = cache
        n_layers = len(pres)
        for layer in reversed(range(n_layers)):
            if layer < n_layers - 1 or relu_last:
                d_x = d_x * (pres[layer] > 0)
            grads[f"{prefix}.{layer}.w"] += inputs[layer].T @ d_x
            grads[f"{prefix}.{layer}.b"] += d_x.sum(axis=0)
            d_x = d_x @ self.params[f"{prefix}.{layer}.w"].T
        return d_x

    def _check_tokens(self, tokens: np.ndarray):
        if tokens.shape[1] != self.n_tokens:
            raise ValidationError(f"Expected {self.n_tokens} tokens, got {tokens.shape[1]}")
        if tokens.size and (tokens.min() < 0 or tokens.max() >= self.vocab):
            raise ValidationError(f"Token id outside vocabulary of {self.vocab}")

    def forward_batch(
        self,
        dense: np.ndarray,
        tokens: np.ndarray,
        training: bool = False,
        rng: Optional[np.random.Generator] = None
    ) -> Tuple[np.ndarray, Dict]:
        """Batched forward; returns predictions (B,) and the backward cache"""
        dense = np.atleast_2d(np.asarray(dense, dtype=np.float64))
        tokens = np.atleast_2d(np.asarray(tokens, dtype=np.int64))
        cache: Dict = {"tokens": tokens}

        x_d = None
        if self.uses_dense:
            if dense.shape[1] != self.n_dense:
                raise ValidationError(f"Expected {self.n_dense} dense features, got {dense.shape[1]}")
            x_d, cache["tower"] = self._mlp(dense, "tower", relu_last=False)

        x_s = None
        if self.uses_sparse:
            self._check_tokens(tokens)
            x_s = self.params["embed"][tokens]

        if self.mode == PredictorMode.DENSE_SPARSE:
            z = np.concatenate([x_d[:, None, :], x_s], axis=1)
            gram = np.matmul(z, z.transpose(0, 2, 1))
            fused = np.concatenate([gram[:, self._triu[0], self._triu[1]], x_d], axis=1)
            cache["z"] = z
        elif self.mode == PredictorMode.DENSE_ONLY:
            fused = x_d
        else:
            fused = x_s.mean(axis=1)

        hidden, cache["head"] = self._mlp(fused, "head", relu_last=True)

        mask = np.ones_like(hidden)
        if training and self.dropout > 0:
            rng = rng or np.random.default_rng(0)
            mask = (rng.random(hidden.shape) >= self.dropout) / (1.0 - self.dropout)
        dropped = hidden * mask
        cache["mask"] = mask
        cache["dropped"] = dropped

        out = dropped @ self.params["out.0.w"] + self.params["out.0.b"]
        return out[:, 0], cache

    def backward(self, d_out: np.ndarray, cache: Dict) -> Dict[str, np.ndarray]:
        """Gradients of a loss with d loss / d prediction = ``d_out`` (B,)"""
        grads = {name: np.zeros_like(p) for name, p in self.params.items()}
        d_out = np.asarray(d_out, dtype=np.float64)[:, None]

        grads["out.0.w"] += cache["dropped"].T @ d_out
        grads["out.0.b"] += d_out.sum(axis=0)
        d_hidden = (d_out @ self.params["out.0.w"].T) * cache["mask"]
        d_fused = self._mlp_backward(d_hidden, "head", cache["head"], grads)

        d_xd = None
        d_xs = None
        if self.mode == PredictorMode.DENSE_SPARSE:
            z = cache["z"]
            d_gram = np.zeros((z.shape[0], self.n_tokens + 1, self.n_tokens + 1))
            d_gram[:, self._triu[0], self._triu[1]] = d_fused[:, :self.n_interactions]
            d_z = np.matmul(d_gram + d_gram.transpose(0, 2, 1), z)
            d_xd = d_fused[:, self.n_interactions:] + d_z[:, 0]
            d_xs = d_z[:, 1:]
        elif self.mode == PredictorMode.DENSE_ONLY:
            d_xd = d_fused
        else:
            d_xs = np.repeat(d_fused[:, None, :] / self.n_tokens, self.n_tokens, axis=1)

        if d_xs is not None:
            one_hot = cache["tokens"].reshape(-1, 1) == np.arange(self.vocab)
            grads["embed"] += one_hot.T.astype(np.float64) @ d_xs.reshape(-1, self.dim)
        if d_xd is not None:
            self._mlp_backward(d_xd, "tower", cache["tower"], grads)
        return grads

    def forward(self, arch: EncodedArch, training: bool = False, dropout_seed: Optional[int] = None) -> float:
        """Prediction for one architecture in normalized target units"""
        rng = np.random.default_rng(dropout_seed) if training else None
        out, _ = self.forward_batch(arch.dense[None, :], arch.tokens[None, :], training=training, rng=rng)
        return float(out[0])

    def grad(self, arch: EncodedArch, target: float, dropout_seed: int = 0) -> Dict[str, np.ndarray]:
        """Exact gradients of 0.5 * (forward - target)^2 in training mode"""
        rng = np.random.default_rng(dropout_seed)
        out, cache = self.forward_batch(arch.dense[None, :], arch.tokens[None, :], training=True, rng=rng)
        return self.backward(out - target, cache)

    def predict_batch(self, archs: Sequence[EncodedArch]) -> np.ndarray:
        """Evaluation-mode predictions in normalized target units"""
        if not archs:
            return np.zeros(0)
        dense = np.stack([a.dense for a in archs])
        tokens = np.stack([a.tokens for a in archs])
        out, _ = self.forward_batch(dense, tokens, training=False)
        return out

    def denormalize(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values) * self.target_std + self.target_mean

    def copy(self) -> "DSPredictor":
        return copy.deepcopy(self)

    def n_parameters(self) -> int:
        return int(sum(p.size for p in self.params.values()))


def margin_rank_loss(pred_i: float, pred_j: float, y_i: float, y_j: float, margin: float) -> float:
    """Hinge on the predicted gap in the direction of the true order"""
    return max(0.0, margin - float(np.sign(y_i - y_j)) * (pred_i - pred_j))


@lru_cache(maxsize=8)
def _pairs(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _rank_loss_and_grad(pred: np.ndarray, y: np.ndarray, margin: float) -> Tuple[float, np.ndarray]:
    """Mean hinge over in-batch pairs i < j with y_i != y_j, and its gradient"""
    n = pred.shape[0]
    grad = np.zeros(n)
    if n < 2:
        return 0.0, grad

    i, j = _pairs(n)
    sign = np.sign(y[i] - y[j])
    valid = sign != 0
    if not valid.any():
        return 0.0, grad

    i, j, sign = i[valid], j[valid], sign[valid]
    hinge = margin - sign * (pred[i] - pred[j])
    active = hinge > 0
    n_pairs = i.size

    grad -= np.bincount(i[active], weights=sign[active], minlength=n) / n_pairs
    grad += np.bincount(j[active], weights=sign[active], minlength=n) / n_pairs
    return float(np.maximum(0.0, hinge).sum() / n_pairs), grad


def _fresh_state() -> Dict:
    return {"t": 0, "m": {}, "v": {}}


def _adam_step(p: DSPredictor, grads: Dict[str, np.ndarray], state: Dict, cfg: TrainConfig, learning_rate: float):
    """
    One Adam update, in place.

    lr * m_hat / (sqrt(v_hat) + eps) with the bias corrections folded into a
    scalar step size and an effective epsilon.
    """
    state["t"] += 1
    t = state["t"]
    correction = np.sqrt(1.0 - cfg.beta2 ** t)
    step = learning_rate * correction / (1.0 - cfg.beta1 ** t)
    eps = cfg.eps * correction
    for name, param in p.params.items():
        g = grads[name]
        m = state["m"].setdefault(name, np.zeros_like(param))
        v = state["v"].setdefault(name, np.zeros_like(param))
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * (g * g)
        param -= step * m / (np.sqrt(v) + eps)


def encode_dataset(samples: Sequence[ArchSample], space: Optional[SearchSpaceSpec] = None) -> Tuple[np.ndarray, np.ndarray]:
    encoded = [encode_features(s.genotype, space) for s in samples]
    return np.stack([e.dense for e in encoded]), np.stack([e.tokens for e in encoded])


def _zscore_stats(values: np.ndarray) -> Tuple[float, float]:
    std = float(values.std())
    return float(values.mean()), (std if std > 1e-12 else 1.0)


def _fit(
    p: DSPredictor,
    dense: np.ndarray,
    tokens: np.ndarray,
    targets: np.ndarray,
    epochs: int,
    cfg: TrainConfig,
    command: str,
    learning_rate: float,
    state: Dict
) -> List[float]:
    """
    Minibatch Adam on MSE + rank_weight * margin rank loss.

    Updates ``state`` (step count and moments) in place; returns the per-epoch
    mean loss.
    """
    shuffle_rng = np.random.default_rng([cfg.seed, 0])
    dropout_rng = np.random.default_rng([cfg.seed, 1])
    log = logger.bind(**get_run_metadata(command=command, seed=cfg.seed, mode=p.mode.value))

    n = targets.shape[0]
    curve = []
    for epoch in range(epochs):
        order = shuffle_rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            y = targets[batch]
            pred, cache = p.forward_batch(dense[batch], tokens[batch], training=True, rng=dropout_rng)

            diff = pred - y
            mse = float(np.mean(diff * diff))
            rank, d_rank = _rank_loss_and_grad(pred, y, cfg.rank_margin)
            d_pred = 2.0 * diff / batch.size + cfg.rank_weight * d_rank

            _adam_step(p, p.backward(d_pred, cache), state, cfg, learning_rate)
            total += (mse + cfg.rank_weight * rank) * batch.size

        curve.append(total / n)
        if (epoch + 1) % 10 == 0 or epoch == epochs - 1:
            log.bind(epoch=epoch + 1).info(f"epoch {epoch + 1}/{epochs} loss {curve[-1]:.5f}")

    return curve


def train(
    p: DSPredictor,
    dataset: Sequence[ArchSample],
    cfg: Optional[TrainConfig] = None,
    space: Optional[SearchSpaceSpec] = None
) -> Tuple[DSPredictor, List[float]]:
    """
    Fit the predictor to z-scored performance in place.

    Normalization stats come from ``cfg`` when set, otherwise from ``dataset``
    (which should be the training split). Adam moments left by
    ``pretrain_macs`` are resumed and then released.
    """
    cfg = cfg or TrainConfig()
    if not dataset:
        raise ValidationError("Cannot train on an empty dataset")

    perf = np.array([s.perf for s in dataset], dtype=np.float64)
    mean, std = _zscore_stats(perf)
    if cfg.target_mean is not None:
        mean = cfg.target_mean
    if cfg.target_std is not None:
        std = cfg.target_std
    p.target_mean, p.target_std = mean, std

    dense, tokens = encode_dataset(dataset, space)
    state = p.optimizer_state or _fresh_state()
    curve = _fit(p, dense, tokens, (perf - mean) / std, cfg.epochs, cfg, "train_predictor", cfg.learning_rate, state)
    p.optimizer_state = None
    return p, curve


def pretrain_macs(
    p: DSPredictor,
    dataset: Sequence[ArchSample],
    cfg: Optional[TrainConfig] = None,
    space: Optional[SearchSpaceSpec] = None
) -> DSPredictor:
    """
    Regress z-scored log10(MACs) for ``cfg.pretrain_epochs``.

    The parameters and the Adam moments initialize the following ``train``.
    """
    cfg = cfg or TrainConfig()
    if not dataset:
        raise ValidationError("Cannot pretrain on an empty dataset")
    if cfg.pretrain_epochs == 0:
        return p

    macs = np.array([s.macs for s in dataset], dtype=np.float64)
    if (macs <= 0).any():
        raise InvalidArgumentError("Every sample needs a positive MAC count for pretraining")
    log_macs = np.log10(macs)
    mean, std = _zscore_stats(log_macs)

    dense, tokens = encode_dataset(dataset, space)
    state = _fresh_state()
    _fit(
        p, dense, tokens, (log_macs - mean) / std, cfg.pretrain_epochs, cfg, "pretrain_macs",
        cfg.pretrain_learning_rate, state
    )
    p.optimizer_state = state
    return p


def kendall_tau(preds: Sequence[float], truths: Sequence[float]) -> float:
    """
    Tie-corrected Kendall tau-b by exhaustive pair counting.

    Raises InvalidArgumentError for unequal lengths, fewer than two items, or
    when either side is entirely tied.
    """
    preds = np.asarray(preds, dtype=np.float64)
    truths = np.asarray(truths, dtype=np.float64)
    if preds.shape != truths.shape or preds.ndim != 1:
        raise InvalidArgumentError(f"Expected equal-length vectors, got {preds.shape} and {truths.shape}")
    n = preds.shape[0]
    if n < 2:
        raise InvalidArgumentError("Kendall tau needs at least two items")

    i, j = np.triu_indices(n, k=1)
    sign_p = np.sign(preds[i] - preds[j])
    sign_t = np.sign(truths[i] - truths[j])

    n0 = i.size
    untied_p = n0 - int(np.count_nonzero(sign_p == 0))
    untied_t = n0 - int(np.count_nonzero(sign_t == 0))
    if untied_p == 0 or untied_t == 0:
        raise InvalidArgumentError("Kendall tau is undefined when one side is entirely tied")

    return float(np.sum(sign_p * sign_t) / np.sqrt(float(untied_p) * float(untied_t)))


def evaluate_predictor(
    p: DSPredictor,
    samples: Sequence[ArchSample],
    space: Optional[SearchSpaceSpec] = None
) -> PredictorMetrics:
    """MSE against targets normalized with the predictor's stats, and Kendall tau-b"""
    if not samples:
        raise ValidationError("Cannot evaluate on an empty dataset")
    dense, tokens = encode_dataset(samples, space)
    preds, _ = p.forward_batch(dense, tokens, training=False)
    truths = np.array([s.perf for s in samples], dtype=np.float64)
    normalized = (truths - p.target_mean) / p.target_std
    return PredictorMetrics(
        mse=float(np.mean((preds - normalized) ** 2)),
        kendall_tau=kendall_tau(preds, truths)
    )


def compare_predictors(
    dataset: Sequence[ArchSample],
    modes: Optional[Sequence[PredictorMode]] = None,
    seeds: Sequence[int] = (0,),
    train_cfg: Optional[TrainConfig] = None,
    predictor_cfg: Optional[PredictorConfig] = None,
    train_fraction: float = 0.8,
    pretrain: bool = False
) -> Dict[str, List[float]]:
    """
    Held-out Kendall tau of every mode for every seed.

    Each (mode, seed) run trains on the first ``train_fraction`` of the dataset
    and evaluates on the rest.
    """
    modes = list(modes or PredictorMode)
    train_cfg = train_cfg or TrainConfig()
    predictor_cfg = predictor_cfg or PredictorConfig()
    train_set, val_set = split_dataset(list(dataset), train_fraction)

    results: Dict[str, List[float]] = {PredictorMode(m).value: [] for m in modes}
    for seed in seeds:
        cfg = train_cfg.model_copy(update={"seed": seed})
        for mode in modes:
            mode_cfg = predictor_cfg.model_copy(update={"mode": PredictorMode(mode)})
            p = DSPredictor.from_config(mode_cfg, seed=seed)
            if pretrain:
                pretrain_macs(p, train_set, cfg)
            train(p, train_set, cfg)
            tau = evaluate_predictor(p, val_set).kendall_tau
            results[p.mode.value].append(tau)
            logger.info(f"compare_predictors seed {seed} {p.mode.value}: tau {tau:.4f}")
    return results
