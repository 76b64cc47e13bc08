"""
Command-line interface: python -m gpdmm <command>

Every run-level key of RunConfig can come from a JSON file (--config) and be
overridden by its long-form flag. Exit codes: 0 success, 1 usage error,
2 data error, 3 numeric failure.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from gpdmm import __version__
from gpdmm.config import configure_logging, settings
from gpdmm.data.io import load_dataset, mccv_split, read_sequence_file, save_dataset, write_sequence_file
from gpdmm.exceptions import GPDMMError, UsageError
from gpdmm.experiments.evaluation import evaluate
from gpdmm.experiments.mccv import run_mccv, summary_table
from gpdmm.experiments.search import run_search
from gpdmm.gp.mixture import classify, continue_prefix, train
from gpdmm.gp.optim import write_trace
from gpdmm.gp.serialization import load_model, save_model
from gpdmm.models.data import SynthSpec, default_synth_spec, overlapping_synth_spec
from gpdmm.models.latent import Geometry
from gpdmm.models.run_config import FLAG_PATHS, RunConfig, resolve_config
from gpdmm.simulator.generator import synth_generate

logger = logging.getLogger("gpdmm.cli")


class ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; here usage errors exit with 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Documento JSON con la configuración de la corrida")
    parser.add_argument("--manifest", help="Manifiesto del dataset")
    group = parser.add_argument_group("espacio latente")
    group.add_argument("--fourier-order", type=int)
    group.add_argument("--include-constant", action=argparse.BooleanOptionalAction, default=None)
    group.add_argument("--reduction-dims", type=int)
    group.add_argument("--markov-order", type=int, choices=[1, 2])
    group.add_argument("--geometry", choices=[g.value for g in Geometry])
    group.add_argument("--epsilon", type=float)
    group = parser.add_argument_group("entrenamiento")
    group.add_argument("--rounds", type=int)
    group.add_argument("--emission-steps", type=int)
    group.add_argument("--dynamics-steps", type=int)
    group.add_argument("--polish-steps", type=int)
    group.add_argument("--tolerance", type=float)
    group.add_argument("--emission-variance-scale", type=float)
    group.add_argument("--dynamics-variance-scale", type=float)
    group.add_argument("--pooled-dynamics", action=argparse.BooleanOptionalAction, default=None)
    group.add_argument("--fitc-inducing", type=int)
    group.add_argument("--fitc-steps", type=int)
    group = parser.add_argument_group("evaluación")
    group.add_argument("--prefix-fraction", type=float)
    group.add_argument("--dampening-window", type=int)
    group.add_argument("--n-validation", type=int)
    group.add_argument("--n-test", type=int)
    group.add_argument("--iterations", type=int)
    group.add_argument("--patience", type=int)
    group.add_argument("--budget", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output-dir")
    parser.add_argument("--plots", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--workers", type=int)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="gpdmm", description="Mezclas de modelos dinámicos GP para movimiento humano")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Registro en nivel DEBUG")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = commands.add_parser("train", help="Entrenar con las secuencias de entrenamiento del split")
    _add_run_flags(p)
    p = commands.add_parser("eval", help="Evaluar un modelo en las secuencias de prueba del split")
    _add_run_flags(p)
    p.add_argument("--model", required=True, help="Documento de modelo")
    p = commands.add_parser("mccv", help="Validación cruzada Monte Carlo con parada temprana")
    _add_run_flags(p)
    p = commands.add_parser("search", help="Búsqueda aleatoria de hiperparámetros")
    _add_run_flags(p)

    p = commands.add_parser("synth", help="Escribir un dataset sintético")
    p.add_argument("--spec", help="SynthSpec en JSON; sin él se usa la suite separable")
    p.add_argument("--overlap", action="store_true", help="Suite de clases solapadas")
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--feature-count", type=int, default=12)
    p.add_argument("--length", type=int, default=120)
    p.add_argument("--trials", type=int, default=6)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--variation", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="Directorio de salida")

    for name, text in (("classify", "Clasificar un prefijo observado"), ("generate", "Continuar un prefijo")):
        p = commands.add_parser(name, help=text)
        p.add_argument("--model", required=True)
        p.add_argument("--input", required=True, help="CSV tiempo x rasgos")
        p.add_argument("--output-dir", default=None)
        if name == "generate":
            p.add_argument("--horizon", type=int, required=True)
            p.add_argument("--class", dest="class_hint", help="Etiqueta o índice de clase")

    p = commands.add_parser("serve", help="Servir un modelo por HTTP y WebSocket")
    p.add_argument("--model", help="Documento de modelo (por defecto GPDMM_MODEL_PATH)")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {flag: getattr(args, flag) for flag in FLAG_PATHS if hasattr(args, flag)}


def _output_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UsageError(f"No se puede crear el directorio de salida {out}: {e}") from e
    return out


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as e:
        raise UsageError(f"No se puede escribir {path}: {e}") from e


def _resolve(args: argparse.Namespace) -> RunConfig:
    config = resolve_config(args.config, _overrides(args))
    text = config.model_dump_json(indent=2)
    logger.info(f"Configuración resuelta:\n{text}")
    _write_text(_output_dir(config.output_dir) / "resolved_config.json", text + "\n")
    return config


def _split(config: RunConfig):
    dataset = load_dataset(config.require_manifest())
    return dataset, mccv_split(dataset, config.seed, config.n_validation, config.n_test)


def cmd_train(args) -> int:
    config = _resolve(args)
    dataset, split = _split(config)
    model = train(dataset.subset(split.train), config.latent, config.train)
    out = Path(config.output_dir)
    save_model(model, out / "model.json")
    write_trace(model.trace, out / "train_log.jsonl")
    if config.plots:
        from gpdmm.plotting import plot_latent
        plot_latent(model, out / "plots")
    return 0


def cmd_eval(args) -> int:
    config = _resolve(args)
    dataset, split = _split(config)
    model = load_model(args.model)
    report, outcomes = evaluate(model, dataset, split.test, config.prefix_fraction, config.dampening_window)
    out = Path(config.output_dir)
    _write_text(out / "report.json", report.model_dump_json(indent=2) + "\n")
    _write_text(out / "report.txt", report.to_text())
    print(report.to_text(), end="")
    if config.plots:
        from gpdmm.plotting import plot_generation, plot_latent
        plot_latent(model, out / "plots")
        plot_generation(outcomes, dataset, out / "plots")
    return 0


def cmd_mccv(args) -> int:
    config = _resolve(args)
    dataset = load_dataset(config.require_manifest())
    _, summary = run_mccv(dataset, config, _output_dir(Path(config.output_dir) / "mccv"))
    for name, text in summary_table(summary).items():
        print(f"{name:<16} {text}")
    return 0


def cmd_search(args) -> int:
    config = _resolve(args)
    dataset = load_dataset(config.require_manifest())
    ranked, _ = run_search(dataset, config, _output_dir(Path(config.output_dir) / "search"))
    for entry in ranked:
        f1 = "n/d" if entry.validation_f1 is None else f"{entry.validation_f1:.4f}"
        d = "n/d" if entry.validation_frechet is None else f"{entry.validation_frechet:.4f}"
        print(f"{entry.rank:>3}  candidato {entry.candidate:>3}  F1 {f1}  D_avg {d}")
    return 0


def cmd_synth(args) -> int:
    if args.spec:
        path = Path(args.spec)
        if not path.is_file():
            raise UsageError(f"SynthSpec no encontrado: {path}")
        try:
            spec = SynthSpec.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise UsageError(f"SynthSpec inválido: {e.errors()[0]['msg']}") from e
    else:
        try:
            if args.overlap:
                spec = overlapping_synth_spec(feature_count=args.feature_count, length=args.length,
                                              trials=args.trials, noise=args.noise)
            else:
                spec = default_synth_spec(classes=args.classes, feature_count=args.feature_count,
                                          length=args.length, trials=args.trials, noise=args.noise,
                                          variation=args.variation)
        except ValidationError as e:
            err = e.errors()[0]
            raise UsageError(f"Parámetro sintético inválido '{err['loc'][-1]}': {err['msg']}") from e
    dataset = synth_generate(spec, seed=args.seed)
    try:
        save_dataset(dataset, _output_dir(args.out))
    except OSError as e:
        raise UsageError(f"No se puede escribir el dataset en {args.out}: {e}") from e
    return 0


def cmd_classify(args) -> int:
    model = load_model(args.model)
    result = classify(model, read_sequence_file(args.input, model.D))
    text = result.model_dump_json(indent=2)
    out = _output_dir(args.output_dir or settings.OUTPUT_DIR)
    _write_text(out / "classification.json", text + "\n")
    print(text)
    return 0


def cmd_generate(args) -> int:
    model = load_model(args.model)
    hint: Optional[Any] = args.class_hint
    if hint is not None and hint.isdigit():
        hint = int(hint)
    class_index, frames = continue_prefix(model, read_sequence_file(args.input, model.D), hint, args.horizon)
    out = _output_dir(args.output_dir or settings.OUTPUT_DIR)
    write_sequence_file(out / "generated.csv", frames)
    logger.info(f"✅ {frames.shape[0]} pasos generados con la clase '{model.class_labels[class_index]}'")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    if args.model:
        settings.MODEL_PATH = args.model
    settings.resolve_model_path()
    uvicorn.run("gpdmm.main:app", host=args.host, port=args.port)
    return 0


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "mccv": cmd_mccv,
    "search": cmd_search,
    "synth": cmd_synth,
    "classify": cmd_classify,
    "generate": cmd_generate,
    "serve": cmd_serve,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)
    try:
        return COMMANDS[args.command](args)
    except GPDMMError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except RuntimeError as e:
        # raised by settings.resolve_model_path
        logger.error(f"❌ {e}")
        print(f"error: {e}", file=sys.stderr)
        return UsageError.exit_code


if __name__ == "__main__":
    sys.exit(main())
