"""
The mixture: one shared emission GP plus one dynamical GP expert per class,
gated by the Bayes posterior over classes.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from gpdmm.data.dataset import Dataset
from gpdmm.exceptions import InsufficientPrefixError, MissingClassError, ShapeError, TooShortError, UsageError
from gpdmm.gp.dynamics import (
    DynamicsModel,
    build_dynamics,
    dynamics_terms,
    fit_dynamics_hyperparameters,
    fitc_fit,
    rollout,
    sequence_score,
    transition_indices,
)
from gpdmm.gp.emission import (
    EmissionModel,
    ProjectionInit,
    build_emission,
    emission_predict,
    emission_terms,
    infer_latent,
)
from gpdmm.gp.optim import ObjectiveTrace, log_bounds, maximize
from gpdmm.latent.geometry import build_latent_init
from gpdmm.models.kernel import KernelSum, dynamics_kernel, emission_kernel
from gpdmm.models.latent import LatentConfig, TrainOptions
from gpdmm.models.reports import ClassificationResult

logger = logging.getLogger(__name__)

# Projection budget for test prefixes
PROJECTION_STEPS = 200

RoundCallback = Callable[[int, "TrainedGPDMM"], Optional[bool]]


@dataclass(frozen=True)
class TrainedGPDMM:
    """Shared emission GP, experts, class priors and the latent layout they were trained on"""

    emission: EmissionModel
    experts: List[DynamicsModel]
    priors: np.ndarray
    latent_config: LatentConfig
    class_labels: List[str]
    # row offsets of each training sequence inside emission.X
    bounds: List[int]
    sequence_classes: List[int]
    pooled: bool = False
    trace: Optional[ObjectiveTrace] = field(default=None, compare=False, repr=False)

    @property
    def order(self) -> int:
        return self.latent_config.markov_order

    @property
    def A(self) -> int:
        return len(self.class_labels)

    @property
    def D(self) -> int:
        return self.emission.D

    @property
    def Q(self) -> int:
        return self.emission.Q

    def expert_for(self, class_index: int) -> DynamicsModel:
        return self.experts[0] if self.pooled else self.experts[class_index]

    def class_latents(self, class_index: int) -> List[np.ndarray]:
        """Training latent blocks of one class, in dataset order"""
        X = self.emission.X
        return [X[start:stop] for (start, stop), c in zip(zip(self.bounds[:-1], self.bounds[1:]), self.sequence_classes)
                if c == class_index]


# ----------------------------------------------------------------------------------------------
# Joint objective
# ----------------------------------------------------------------------------------------------

def _expert_rows(bounds: Sequence[int], sequence_classes: Sequence[int], n_experts: int,
                 order: int, pooled: bool) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Transition row indices read by each expert; experts only see rows of their class"""
    groups = []
    spans = list(zip(bounds[:-1], bounds[1:]))
    for a in range(n_experts):
        ins, outs = [], []
        for (start, stop), c in zip(spans, sequence_classes):
            if pooled or c == a:
                idx_in, idx_out = transition_indices([start, stop], order)
                ins.append(idx_in)
                outs.append(idx_out)
        groups.append((np.vstack(ins), np.concatenate(outs)))
    return groups


def _gather(X: np.ndarray, idx_in: np.ndarray, idx_out: np.ndarray):
    return X[idx_in].reshape(len(idx_out), -1), X[idx_out]


def joint_terms(X, Yc, emission_k: KernelSum, dynamics_ks: Sequence[KernelSum],
                groups, with_grad: bool = True):
    """
    Emission log-likelihood plus the sum of every expert's dynamics log-likelihood.

    Returns:
        tuple: (value, dL/dX, dL/dtheta_emission, [dL/dtheta_expert, ...])
    """
    value, dX, d_emission = emission_terms(X, Yc, emission_k, with_grad)
    d_dynamics = []
    for kernel, (idx_in, idx_out) in zip(dynamics_ks, groups):
        X_in, X_out = _gather(X, idx_in, idx_out)
        v, dX_in, dX_out, d_theta = dynamics_terms(kernel, X_in, X_out, with_grad)
        value += v
        if not with_grad:
            continue
        dX_in = dX_in.reshape(idx_in.shape[0], idx_in.shape[1], X.shape[1])
        for lag in range(idx_in.shape[1]):
            np.add.at(dX, idx_in[:, lag], dX_in[:, lag])
        np.add.at(dX, idx_out, dX_out)
        d_dynamics.append(d_theta)
    return float(value), dX, d_emission, d_dynamics


@dataclass
class _JointState:
    X: np.ndarray
    emission_k: KernelSum
    dynamics_ks: List[KernelSum]


def _latent_phase(state: _JointState, Yc, groups, steps: int, tolerance: float,
                  trace: ObjectiveTrace, round_index: int, include_dynamics: bool, phase: str) -> None:
    """Optimize X and the emission hyperparameters (and optionally every expert's) in place"""
    n_x = state.X.size
    shape = state.X.shape
    sizes = [len(k.param_names()) for k in state.dynamics_ks]
    n_e = len(state.emission_k.param_names())

    def unpack(params):
        X = params[:n_x].reshape(shape)
        emission_k = state.emission_k.from_log_params(params[n_x:n_x + n_e])
        if not include_dynamics:
            return X, emission_k, state.dynamics_ks
        dynamics_ks, offset = [], n_x + n_e
        for kernel, size in zip(state.dynamics_ks, sizes):
            dynamics_ks.append(kernel.from_log_params(params[offset:offset + size]))
            offset += size
        return X, emission_k, dynamics_ks

    def fun(params):
        X, emission_k, dynamics_ks = unpack(params)
        value, dX, d_e, d_ds = joint_terms(X, Yc, emission_k, dynamics_ks, groups)
        grad = [dX.ravel(), d_e * emission_k.get_params()]
        if include_dynamics:
            grad += [d * k.get_params() for d, k in zip(d_ds, dynamics_ks)]
        return value, np.concatenate(grad)

    lo, hi = log_bounds(1)[0]
    x0 = [state.X.ravel(), np.clip(state.emission_k.log_params(), lo, hi)]
    bounds = [(None, None)] * n_x + log_bounds(n_e)
    if include_dynamics:
        x0 += [np.clip(k.log_params(), lo, hi) for k in state.dynamics_ks]
        bounds += log_bounds(sum(sizes))
    outcome = maximize(fun, np.concatenate(x0), max_iter=steps, tolerance=tolerance, bounds=bounds,
                       trace=trace, phase=phase, round_index=round_index)
    state.X, state.emission_k, state.dynamics_ks = unpack(outcome.x)


def _dynamics_phase(state: _JointState, groups, steps: int, tolerance: float, trace: ObjectiveTrace,
                    round_index: int, workers: int, order: int, total_before: float) -> None:
    """Fit each expert's hyperparameters with X fixed; experts are independent"""
    experts = []
    for a, (kernel, (idx_in, idx_out)) in enumerate(zip(state.dynamics_ks, groups)):
        X_in, X_out = _gather(state.X, idx_in, idx_out)
        experts.append(build_dynamics(a, order, X_in, X_out, kernel))
    local = [ObjectiveTrace() for _ in experts]

    def fit(a: int) -> DynamicsModel:
        return fit_dynamics_hyperparameters(experts[a], max_iter=steps, tolerance=tolerance,
                                            trace=local[a], round_index=round_index)

    if workers > 1 and len(experts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fitted = list(pool.map(fit, range(len(experts))))
    else:
        fitted = [fit(a) for a in range(len(experts))]

    # expert traces hold their own term only; shift them onto the joint objective in class order
    running = total_before
    for expert, new, sub in zip(experts, fitted, local):
        before = dynamics_terms(expert.kernel, expert.X_in, expert.X_out, with_grad=False)[0]
        offset = running - before
        for entry in sub.entries:
            trace.record(entry["phase"], entry["round"], entry["iteration"], entry["objective"] + offset)
        after = dynamics_terms(new.kernel, new.X_in, new.X_out, with_grad=False)[0]
        running = offset + after
    state.dynamics_ks = [expert.kernel for expert in fitted]


# ----------------------------------------------------------------------------------------------
# Training
# ----------------------------------------------------------------------------------------------

def _derived_kernels(Yc: np.ndarray, X: np.ndarray, options: TrainOptions, n_experts: int):
    y_var = float(np.mean(np.var(Yc, axis=0))) or 1.0
    x_var = float(np.mean(np.var(X, axis=0))) or 1.0
    emission_k = options.emission_kernel or emission_kernel(
        variance=y_var * options.emission_variance_scale, lengthscale=1.0,
        bias=0.1 * y_var, noise=0.01 * y_var,
    )
    dynamics_k = options.dynamics_kernel or dynamics_kernel(
        variance=x_var * options.dynamics_variance_scale, lengthscale=1.0,
        linear_variance=0.1, noise=0.01 * x_var,
    )
    return emission_k, [dynamics_k] * n_experts


def _assemble(state: _JointState, Y: np.ndarray, groups, dataset: Dataset, latent_config: LatentConfig,
              options: TrainOptions, bounds: List[int], sequence_classes: List[int], priors: np.ndarray,
              trace: Optional[ObjectiveTrace]) -> TrainedGPDMM:
    emission = build_emission(state.X, Y, state.emission_k)
    experts = []
    for a, (kernel, (idx_in, idx_out)) in enumerate(zip(state.dynamics_ks, groups)):
        X_in, X_out = _gather(state.X, idx_in, idx_out)
        experts.append(build_dynamics(a, latent_config.markov_order, X_in, X_out, kernel))
    return TrainedGPDMM(emission=emission, experts=experts, priors=priors, latent_config=latent_config,
                        class_labels=list(dataset.classes), bounds=list(bounds),
                        sequence_classes=list(sequence_classes), pooled=options.pooled_dynamics, trace=trace)


def class_priors(dataset: Dataset) -> np.ndarray:
    """p(a) = n_a / N over training sequences"""
    counts = np.array([len(dataset.indices_of(c)) for c in dataset.classes], dtype=float)
    return counts / counts.sum()


def sparsify(model: TrainedGPDMM, inducing: int, steps: int = 100) -> TrainedGPDMM:
    """Replace every expert by its FITC approximation with up to `inducing` points"""
    experts = []
    for expert in model.experts:
        M = min(inducing, expert.n)
        if M < inducing:
            logger.info(f"Experto {expert.class_id}: M recortado de {inducing} a {M}")
        experts.append(fitc_fit(expert, M, max_iter=steps))
    return replace(model, experts=experts)


def train(dataset: Dataset, latent_config: LatentConfig, options: Optional[TrainOptions] = None,
          on_round: Optional[RoundCallback] = None) -> TrainedGPDMM:
    """
    Jointly train the shared emission GP and one dynamical expert per class.

    Latents start from build_latent_init. Each round optimizes X with the
    emission hyperparameters on the joint objective, then each expert's
    hyperparameters with X fixed; a final joint polish updates everything.
    Rounds stop early once the relative gain drops under the tolerance or
    when ``on_round`` returns True.

    Args:
        dataset: training sequences, at least one per class, equal length
        latent_config: latent initialization and Markov order
        options: optimizer budgets and model variations
        on_round: called with (round, model snapshot) after every round

    Returns:
        TrainedGPDMM: assembled model, with the accepted-objective trace attached

    Raises:
        MissingClassError: If a class has no training sequence
        TooShortError: If a sequence has no transition for the Markov order
        NumericError: If the objective becomes non-finite
    """
    options = options or TrainOptions()
    for label in dataset.classes:
        if not dataset.indices_of(label):
            raise MissingClassError(f"La clase '{label}' no tiene secuencias de entrenamiento")
    order = latent_config.markov_order
    for seq in dataset.sequences:
        if seq.length <= order:
            raise TooShortError(f"{seq.source_id}: {seq.length} pasos no alcanzan para orden {order}")

    init = build_latent_init(dataset, latent_config)
    Y = np.vstack([seq.values for seq in dataset.sequences])
    Yc = Y - Y.mean(axis=0)
    sequence_classes = dataset.labels()
    n_experts = 1 if options.pooled_dynamics else len(dataset.classes)
    groups = _expert_rows(init.bounds, sequence_classes, n_experts, order, options.pooled_dynamics)
    priors = class_priors(dataset)
    emission_k, dynamics_ks = _derived_kernels(Yc, init.X, options, n_experts)
    state = _JointState(X=init.X.copy(), emission_k=emission_k, dynamics_ks=dynamics_ks)
    trace = ObjectiveTrace()

    logger.info(f"🚀 Entrenando GPDMM: {len(dataset.sequences)} secuencias, {len(dataset.classes)} clases, "
                f"N={Y.shape[0]}, D={Y.shape[1]}, Q={init.X.shape[1]}, orden={order}"
                f"{', dinámica combinada' if options.pooled_dynamics else ''}")

    def snapshot() -> TrainedGPDMM:
        return _assemble(state, Y, groups, dataset, latent_config, options, init.bounds,
                         sequence_classes, priors, trace)

    previous = joint_terms(state.X, Yc, state.emission_k, state.dynamics_ks, groups, with_grad=False)[0]
    logger.info(f"Objetivo inicial: {previous:.6f}")
    rounds_run = 0
    for round_index in range(1, options.rounds + 1):
        rounds_run = round_index
        _latent_phase(state, Yc, groups, options.emission_steps, options.tolerance, trace, round_index,
                      include_dynamics=False, phase="emisión")
        total = joint_terms(state.X, Yc, state.emission_k, state.dynamics_ks, groups, with_grad=False)[0]
        _dynamics_phase(state, groups, options.dynamics_steps, options.tolerance, trace, round_index,
                        options.workers, order, total)
        current = joint_terms(state.X, Yc, state.emission_k, state.dynamics_ks, groups, with_grad=False)[0]
        gain = (current - previous) / max(abs(previous), 1.0)
        logger.info(f"Ronda {round_index}/{options.rounds}: objetivo {current:.6f} (ganancia relativa {gain:.3e})")
        stop = on_round is not None and bool(on_round(round_index, snapshot()))
        previous = current
        if stop:
            logger.info(f"⏹️  Entrenamiento detenido por el llamador en la ronda {round_index}")
            break
        if abs(gain) < options.tolerance:
            logger.info(f"✅ Convergencia en la ronda {round_index}")
            break

    if options.polish_steps > 0:
        _latent_phase(state, Yc, groups, options.polish_steps, options.tolerance, trace, rounds_run + 1,
                      include_dynamics=True, phase="pulido")
        logger.info(f"Pulido final: objetivo "
                    f"{joint_terms(state.X, Yc, state.emission_k, state.dynamics_ks, groups, with_grad=False)[0]:.6f}")

    model = snapshot()
    if options.fitc_inducing is not None:
        model = sparsify(model, options.fitc_inducing, options.fitc_steps)
    logger.info(f"✅ Entrenamiento completo: {len(trace.entries)} pasos aceptados")
    return model


# ----------------------------------------------------------------------------------------------
# Inference
# ----------------------------------------------------------------------------------------------

def _observations(model: TrainedGPDMM, y_prefix) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(y_prefix, dtype=float))
    if Y.shape[1] != model.D:
        raise ShapeError(f"El prefijo tiene {Y.shape[1]} rasgos, el modelo espera {model.D}")
    if not np.all(np.isfinite(Y)):
        raise ShapeError("El prefijo contiene valores no finitos")
    return Y


def posterior_from_scores(log_scores, priors) -> Tuple[np.ndarray, int]:
    """
    Bayes posterior from per-class log-likelihoods, in log space.

    Returns:
        tuple: (posterior, argmax) with ties going to the lowest index
    """
    log_joint = np.asarray(log_scores, dtype=float) + np.log(np.asarray(priors, dtype=float))
    log_joint = log_joint - np.max(log_joint)
    posterior = np.exp(log_joint - logsumexp(log_joint))
    return posterior, int(np.argmax(posterior))


def classify_latent(model: TrainedGPDMM, X_star: np.ndarray) -> Tuple[np.ndarray, np.ndarray, int]:
    """Score a latent prefix under every expert; reduction order is fixed by class index"""
    if model.pooled:
        score = sequence_score(model.experts[0], X_star)
        log_scores = np.full(model.A, score)
    else:
        log_scores = np.array([sequence_score(expert, X_star) for expert in model.experts])
    posterior, predicted = posterior_from_scores(log_scores, model.priors)
    return log_scores, posterior, predicted


def project(model: TrainedGPDMM, y_prefix):
    Y = _observations(model, y_prefix)
    return infer_latent(model.emission, Y, init=ProjectionInit.NEAREST_NEIGHBOR, max_iter=PROJECTION_STEPS)


def classify(model: TrainedGPDMM, y_prefix) -> ClassificationResult:
    """
    Classify an observed prefix.

    The prefix is projected into the latent space through the emission GP
    alone and scored under every expert; the posterior combines these
    scores with the class priors.

    Raises:
        InsufficientPrefixError: If the prefix is not longer than the Markov order
        ShapeError: If the feature count does not match the model
    """
    Y = _observations(model, y_prefix)
    if Y.shape[0] <= model.order:
        raise InsufficientPrefixError(f"El prefijo tiene {Y.shape[0]} pasos; se necesitan más de {model.order}")
    projection = project(model, Y)
    log_scores, posterior, predicted = classify_latent(model, projection.X)
    return ClassificationResult(
        posterior=[float(p) for p in posterior],
        predicted=predicted,
        predicted_label=model.class_labels[predicted],
        log_scores=[float(s) for s in log_scores],
        prefix_length=Y.shape[0],
        projection_converged=projection.converged,
    )


def resolve_class(model: TrainedGPDMM, class_hint: Union[int, str, None]) -> Optional[int]:
    if class_hint is None:
        return None
    if isinstance(class_hint, str):
        if class_hint not in model.class_labels:
            raise UsageError(f"Clase desconocida '{class_hint}'; disponibles: {model.class_labels}")
        return model.class_labels.index(class_hint)
    if not 0 <= int(class_hint) < model.A:
        raise UsageError(f"Índice de clase fuera de rango: {class_hint}")
    return int(class_hint)


def generate_from_latent(model: TrainedGPDMM, X_star: np.ndarray, class_index: int, horizon: int) -> np.ndarray:
    """Roll the chosen expert forward from the last rows of a latent prefix and decode"""
    if horizon <= 0:
        return np.zeros((0, model.D))
    latent = rollout(model.expert_for(class_index), X_star[-model.order:], horizon)
    mean, _ = emission_predict(model.emission, latent)
    return mean


def continue_prefix(model: TrainedGPDMM, y_prefix, class_hint: Union[int, str, None] = None,
                    horizon: int = 0) -> Tuple[int, np.ndarray]:
    """
    Continue an observed prefix for `horizon` steps.

    The expert is the hinted class when given, otherwise the classifier's
    prediction. Generation is a deterministic mean rollout.

    Returns:
        tuple: (class index used, horizon x D generated observations)

    Raises:
        UsageError: If horizon is negative or the class hint is unknown
        InsufficientPrefixError: If the prefix is not longer than the Markov order
    """
    if horizon < 0:
        raise UsageError(f"horizon debe ser >= 0, recibido {horizon}")
    Y = _observations(model, y_prefix)
    if Y.shape[0] <= model.order:
        raise InsufficientPrefixError(f"El prefijo tiene {Y.shape[0]} pasos; se necesitan más de {model.order}")
    class_index = resolve_class(model, class_hint)
    if horizon == 0 and class_index is not None:
        return class_index, np.zeros((0, model.D))
    X_star = project(model, Y).X
    if class_index is None:
        class_index = classify_latent(model, X_star)[2]
    return class_index, generate_from_latent(model, X_star, class_index, horizon)


def generate(model: TrainedGPDMM, y_prefix, class_hint: Union[int, str, None] = None,
             horizon: int = 0) -> np.ndarray:
    """horizon x D continuation of the prefix; an empty array when horizon is 0"""
    if horizon == 0:
        _observations(model, y_prefix)
        return np.zeros((0, model.D))
    return continue_prefix(model, y_prefix, class_hint, horizon)[1]


def prefix_length(sequence_length: int, fraction: float, order: int = 1) -> int:
    """
    Number of leading steps used for classification: floor(fraction * length)
    clamped to [order + 1, length - 1].

    Raises:
        UsageError: If fraction is outside (0, 1)
        TooShortError: If the sequence cannot hold order + 1 prefix steps plus one step to generate
    """
    if not 0.0 < fraction < 1.0:
        raise UsageError(f"La fracción de prefijo debe estar en (0, 1), recibido {fraction}")
    if sequence_length < order + 2:
        raise TooShortError(f"Una secuencia de {sequence_length} pasos es demasiado corta para orden {order}")
    # rounding first keeps products such as 0.29 * 100 = 28.999999999999996 at 29
    T = math.floor(round(fraction * sequence_length, 12))
    return int(min(max(T, order + 1), sequence_length - 1))
