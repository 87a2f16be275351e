"""Measurement protocol: binary token-level micro-F1, per-category F1,
cross-dataset runs averaged over seeds, the alpha sweep, and ablation arms.

Binary token scoring collapses every label to PHI vs non-PHI before
counting, so a NAME token predicted as LOCATION still counts as a binary
true positive; per-category rows expose that kind of confusion instead.
F1 with a zero denominator is defined as 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

from .augment import AugmentConfig, augment_corpus
from .corpus import Corpus, Label
from .errors import PhiconError
from .rng import RandomStream, derive_seed
from . import tagger


@dataclass(frozen=True)
class CategoryScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    micro_f1: float
    precision: float
    recall: float
    per_category: dict[str, CategoryScore]
    token_counts: dict[str, int]  # tp, fp, fn, tn


@dataclass(frozen=True)
class ExperimentResult:
    setting: str
    train_fraction: float
    alpha: int
    arms: dict[str, list[float]]  # arm name -> per-seed micro F1
    means: dict[str, float]


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f1


def binary_token_f1(gold: Corpus, pred: list[list[Label]]) -> EvalReport:
    """Micro P/R/F1 over all tokens binarized to PHI vs non-PHI, plus
    token-level per-coarse-category scores."""
    tax = gold.taxonomy
    sents = list(gold.sentences())
    if len(sents) != len(pred):
        raise PhiconError(
            f"prediction count {len(pred)} != sentence count {len(sents)}")
    tp = fp = fn = tn = 0
    cat: dict[str, dict[str, int]] = {}

    def coarse(label: Label) -> str | None:
        if not label.is_phi:
            return None
        return tax.coarse_of.get(label.phi_type, label.phi_type)

    for si, (sent, labels) in enumerate(zip(sents, pred)):
        if len(sent) != len(labels):
            raise PhiconError(
                f"sentence {si}: prediction length {len(labels)} != "
                f"token count {len(sent)}")
        for tok, plab in zip(sent.tokens, labels):
            g = tok.label.is_phi
            p = plab.is_phi
            if g and p:
                tp += 1
            elif g:
                fn += 1
            elif p:
                fp += 1
            else:
                tn += 1
            gc = coarse(tok.label)
            pc = coarse(plab)
            for c in (gc, pc):
                if c is not None and c not in cat:
                    cat[c] = {"tp": 0, "fp": 0, "fn": 0, "support": 0}
            if gc is not None:
                cat[gc]["support"] += 1
                if pc == gc:
                    cat[gc]["tp"] += 1
                else:
                    cat[gc]["fn"] += 1
            if pc is not None and pc != gc:
                cat[pc]["fp"] += 1

    precision, recall, micro = _prf(tp, fp, fn)
    per_category = {}
    for c in sorted(cat):
        cp, cr, cf = _prf(cat[c]["tp"], cat[c]["fp"], cat[c]["fn"])
        per_category[c] = CategoryScore(cp, cr, cf, cat[c]["support"])
    return EvalReport(micro, precision, recall, per_category,
                      {"tp": tp, "fp": fp, "fn": fn, "tn": tn})


# Salts keeping subsample and tagger seed streams apart per seed index.
_SUBSAMPLE_SALT = 0x5AB5
_TAGGER_SALT = 0x7A66


def _subsample(corpus: Corpus, fraction: float, seed: int) -> Corpus:
    n = len(corpus.documents)
    k = int(fraction * n)
    if k < 1:
        raise PhiconError(
            f"subsample of {n} documents at fraction {fraction} is empty")
    docs = list(corpus.documents)
    RandomStream(seed).shuffle(docs)
    return Corpus(tuple(docs[:k]), corpus.taxonomy)


def cross_dataset_eval(train: Corpus, test: Corpus, arms,
                       train_fraction: float = 1.0, n_seeds: int = 5,
                       epochs: int = 5, registry=None, provider=None,
                       setting: str = "train->test",
                       jobs: int = 1) -> ExperimentResult:
    """Train-on-one-corpus, test-on-the-other protocol.

    arms: list of (name, AugmentConfig | None); None means no augmentation.
    Every arm shares, per seed index, the same training subsample and the
    same tagger seed, so arm differences isolate the augmentation.
    """
    if not 0 < train_fraction <= 1:
        raise PhiconError("train_fraction must be in (0, 1]")
    if n_seeds < 1:
        raise PhiconError("n_seeds must be >= 1")
    needs_aug = any(cfg is not None for _, cfg in arms)
    if needs_aug and (registry is None or provider is None):
        raise PhiconError("augmentation arms need a registry and a provider")

    per_arm: dict[str, list[float]] = {name: [] for name, _ in arms}
    alpha = next((cfg.alpha for _, cfg in arms if cfg is not None), 0)

    def run_one(seed_index: int, name: str, cfg) -> float:
        subsample = _subsample(train, train_fraction,
                               derive_seed(_SUBSAMPLE_SALT, seed_index))
        corpus = subsample
        if cfg is not None:
            aug_cfg = replace(cfg, master_seed=derive_seed(
                cfg.master_seed, seed_index))
            corpus, _ = augment_corpus(corpus, registry, provider, aug_cfg)
        model = tagger.train(corpus, epochs=epochs,
                             seed=derive_seed(_TAGGER_SALT, seed_index))
        return binary_token_f1(
            test, tagger.predict_corpus(model, test)).micro_f1

    tasks = [(s, name, cfg) for s in range(1, n_seeds + 1)
             for name, cfg in arms]
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(lambda t: run_one(*t), tasks))
    else:
        scores = [run_one(*t) for t in tasks]
    for (s, name, cfg), score in zip(tasks, scores):
        per_arm[name].append(score)

    means = {name: sum(v) / len(v) for name, v in per_arm.items()}
    return ExperimentResult(setting, train_fraction, alpha, per_arm, means)


def alpha_sweep(train: Corpus, dev: Corpus, alphas, base_config: AugmentConfig,
                n_seeds: int = 5, epochs: int = 5, registry=None,
                provider=None, setting: str = "train->dev",
                jobs: int = 1) -> dict[int, float]:
    """Mean dev-set micro-F1 for each augmentation factor."""
    if not alphas:
        raise PhiconError("alphas must be non-empty")
    if any(a < 0 for a in alphas):
        raise PhiconError("alphas must be >= 0")
    uniq = []
    for a in alphas:
        if a in uniq:
            warnings.warn(f"duplicate alpha {a} dropped", stacklevel=2)
        else:
            uniq.append(a)
    out: dict[int, float] = {}
    for a in uniq:
        cfg = None if a == 0 else replace(base_config, alpha=a)
        result = cross_dataset_eval(
            train, dev, [(f"alpha={a}", cfg)], train_fraction=1.0,
            n_seeds=n_seeds, epochs=epochs, registry=registry,
            provider=provider, setting=setting, jobs=jobs)
        out[a] = result.means[f"alpha={a}"]
    return out


ABLATION_ARMS = ("baseline", "phi_only", "context_only", "phicon")


def ablation_run(train: Corpus, test: Corpus, base_config: AugmentConfig,
                 n_seeds: int = 5, epochs: int = 5, registry=None,
                 provider=None, train_fraction: float = 1.0,
                 setting: str = "train->test", jobs: int = 1) -> ExperimentResult:
    """Four paired arms: baseline, PHI only, context only, full method."""
    arms = [
        ("baseline", None),
        ("phi_only", replace(base_config, enable_phi=True,
                             enable_sr=False, enable_ri=False)),
        ("context_only", replace(base_config, enable_phi=False,
                                 enable_sr=True, enable_ri=True)),
        ("phicon", replace(base_config, enable_phi=True,
                           enable_sr=True, enable_ri=True)),
    ]
    if base_config.alpha == 0:
        arms = [(name, None) for name, _ in arms]
    return cross_dataset_eval(
        train, test, arms, train_fraction=train_fraction, n_seeds=n_seeds,
        epochs=epochs, registry=registry, provider=provider,
        setting=setting, jobs=jobs)


# ---------------------------------------------------------------------------
# Report rendering

def format_experiment_table(result: ExperimentResult) -> str:
    """Human-readable arm x seed table with means, like the paper's tables."""
    names = list(result.arms)
    n_seeds = max(len(v) for v in result.arms.values())
    width = max(12, max(len(n) for n in names) + 2)
    head = (f"setting={result.setting}  fraction={result.train_fraction:g}  "
            f"alpha={result.alpha}\n")
    cols = "".join(f"  seed{i+1:<3}" for i in range(n_seeds))
    lines = [head, f"{'arm':<{width}}{cols}  {'mean':>7}\n"]
    for name in names:
        scores = "".join(f"  {v:7.4f}" for v in result.arms[name])
        lines.append(f"{name:<{width}}{scores}  {result.means[name]:7.4f}\n")
    return "".join(lines)


def experiment_records(result: ExperimentResult) -> list[str]:
    """Line-delimited JSON records for machine consumption."""
    import json
    out = []
    for name, scores in result.arms.items():
        for i, score in enumerate(scores, start=1):
            out.append(json.dumps({
                "setting": result.setting, "fraction": result.train_fraction,
                "alpha": result.alpha, "arm": name, "seed": i,
                "micro_f1": score,
            }, sort_keys=True))
    for name, mean in result.means.items():
        out.append(json.dumps({
            "setting": result.setting, "fraction": result.train_fraction,
            "alpha": result.alpha, "arm": name, "seed": "mean",
            "micro_f1": mean,
        }, sort_keys=True))
    return out


def format_eval_report(report: EvalReport) -> str:
    lines = [
        f"binary token micro-F1: {report.micro_f1:.4f}  "
        f"(P={report.precision:.4f} R={report.recall:.4f})\n",
        f"token counts: {report.token_counts}\n",
    ]
    if report.per_category:
        lines.append(f"{'category':<10}{'P':>8}{'R':>8}{'F1':>8}{'support':>9}\n")
        for c, s in report.per_category.items():
            lines.append(f"{c:<10}{s.precision:8.4f}{s.recall:8.4f}"
                         f"{s.f1:8.4f}{s.support:9d}\n")
    return "".join(lines)
