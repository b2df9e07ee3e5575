"""
Batch driver wiring the gradient pipeline end to end from a run configuration.

Each command fans its independent analysis units (language x dimension, or
pair x dimension) out over a thread pool and writes one report per unit.
"""
import logging
import os
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from analysis.clustering import ClusterReport, cluster_pole, cluster_poles_jointly
from analysis.difference import NEGATIVE, POSITIVE, difference_gradient, select_pole_candidates
from embeddings.store import (
    EmbeddingSpace,
    l2_normalize,
    load_embeddings,
    nearest_words,
    preprocess,
    remove_first_component_joint,
)
from fitting.pls import Gradient, closed_form_pls1, fit_pls, r_squared
from fitting.validation import corrected_t_test, fit_record, select_k_with_curve
from inference.bootstrap import Z_CRITICAL, bootstrap_interval
from inference.permutation import alignment_test, cosine, difference_test, null_histogram
from lexicon.norms import JoinedSample, NormLexicon, composition_diagnostics, join, join_summary, load_lexicon
from synth.generator import SynthSpec, generate, write_dataset
from utils.config import RunConfig
from utils.errors import ConfigurationError
from utils.parallel import run_ordered

from .reports import ReportWriter

logger = logging.getLogger(__name__)

ALIGNED_DIFFERENT = 'aligned & different'
ALIGNED_NOT_DIFFERENT = 'aligned & not different'
NOT_ALIGNED = 'not aligned'

EXIT_NOT_DIFFERENT = 4
EXIT_NOT_ALIGNED = 5
VERDICT_EXIT_CODES = {
    ALIGNED_DIFFERENT: 0,
    ALIGNED_NOT_DIFFERENT: EXIT_NOT_DIFFERENT,
    NOT_ALIGNED: EXIT_NOT_ALIGNED,
}

RENDERED_WORDS = 10


@dataclass
class CommandResult:
    """Outcome of one CLI command."""
    command: str
    paths: List[str] = field(default_factory=list)
    exit_code: int = 0
    records: List[Dict[str, Any]] = field(default_factory=list)


def verdict(p_align: float, p_diff: float, alpha: float) -> str:
    if p_align > alpha:
        return NOT_ALIGNED
    if p_diff > alpha:
        return ALIGNED_NOT_DIFFERENT
    return ALIGNED_DIFFERENT


def verdict_exit_code(verdicts: List[str]) -> int:
    """The least favourable verdict decides the exit status."""
    return max((VERDICT_EXIT_CODES[v] for v in verdicts), default=0)


def fit_report_name(language: str, dimension: str) -> str:
    return f"fit/{language}_{dimension}.json"


def compare_report_name(pair: Tuple[str, str], dimension: str) -> str:
    return f"compare/{pair[0]}-{pair[1]}_{dimension}.json"


def cluster_report_name(pair: Tuple[str, str], dimension: str, vocabulary: str, pole: str) -> str:
    return f"cluster/{pair[0]}-{pair[1]}_{dimension}_{vocabulary}_{pole}"


class GradientPipeline:
    """
    Loads inputs once and runs fit, compare and cluster analyses for a RunConfig.
    """

    def __init__(self, config: RunConfig, workers: int = 1):
        """
        Initialize the pipeline.

        Args:
            config: Validated run configuration
            workers: Maximum number of concurrent workers
        """
        self.config = config
        self.workers = max(1, int(workers))
        self.writer = ReportWriter(config.output_dir)
        self.provenance = config.to_dict()
        self.provenance.pop('output_dir', None)

        self.spaces: Dict[str, EmbeddingSpace] = {}
        self.lexicons: Dict[str, NormLexicon] = {}
        self.samples: Dict[Tuple[str, str], JoinedSample] = {}
        self._gradients: Dict[Tuple[str, str], Gradient] = {}
        self._gradient_lock = threading.Lock()

        # Thread-safe statistics
        self.stats_lock = threading.Lock()
        self.stats = {'units': 0, 'reports': 0}

        logger.info(f"Pipeline initialized with {self.workers} worker(s), output in {config.output_dir}")

    def _update_stats(self, stat_name: str, increment: int = 1):
        with self.stats_lock:
            self.stats[stat_name] += increment

    def _inner_workers(self, units: int) -> int:
        # Resampling gets the pool only when there is a single unit to run
        return self.workers if units <= 1 else 1

    def load(self, languages: Optional[List[str]] = None):
        """Load and preprocess spaces, load lexicons and join every needed (language, dimension)."""
        languages = languages or list(self.config.languages.keys())
        options = self.config.preprocessing

        raw = {}
        for language in languages:
            inputs = self.config.languages[language]
            raw[language] = load_embeddings(inputs.embeddings, max_vocab=inputs.max_vocab, language=language)
            self.lexicons[language] = load_lexicon(inputs.lexicon, language)

        if options.joint_component_removal and options.remove_first_component:
            normalized = [l2_normalize(raw[l]) if options.l2_normalize else raw[l] for l in languages]
            prepared = remove_first_component_joint(normalized)
            self.spaces = dict(zip(languages, prepared))
        else:
            self.spaces = {
                language: preprocess(
                    raw[language],
                    l2=options.l2_normalize,
                    remove_component=options.remove_first_component,
                )
                for language in languages
            }

        unrated = [
            dimension for dimension in self.config.dimensions
            if all(dimension not in self.lexicons[l].dimensions for l in languages)
        ]
        if unrated:
            raise ConfigurationError(f"No lexicon rates dimension(s): {', '.join(unrated)}")

        full = options.l2_normalize and options.remove_first_component
        for language in languages:
            for dimension in self.config.dimensions:
                if dimension not in self.lexicons[language].dimensions:
                    logger.warning(f"{language} lexicon has no '{dimension}' ratings; skipping that unit")
                    continue
                self.samples[(language, dimension)] = join(
                    self.lexicons[language],
                    self.spaces[language],
                    dimension,
                    min_samples=self.config.min_samples(),
                    require_preprocessed=full,
                )

    def language_units(self) -> List[Tuple[str, str]]:
        """Joined (language, dimension) units in config order."""
        return [
            (language, dimension)
            for language in self.config.languages for dimension in self.config.dimensions
            if (language, dimension) in self.samples
        ]

    def pair_units(self) -> List[Tuple[Tuple[str, str], str]]:
        """(pair, dimension) units whose two languages both rate the dimension."""
        units = []
        for pair in self.config.language_pairs():
            for dimension in self.config.dimensions:
                if all((language, dimension) in self.samples for language in pair):
                    units.append((pair, dimension))
                else:
                    logger.warning(f"{pair[0]}-{pair[1]}/{dimension}: not rated in both lexicons, skipped")
        return units

    def selected_gradient(self, language: str, dimension: str) -> Tuple[Gradient, Any, List[float], List[float]]:
        """Multi-component gradient with K chosen by the one-standard-error rule."""
        sample = self.samples[(language, dimension)]
        t = self.config.tests
        k_cap = max(1, min(t.k_max, sample.X.shape[1], sample.n - 1))
        K, cv_errors, cv_ses = select_k_with_curve(sample.X, sample.y, k_cap, t.cv_folds, self.config.seed)
        gradient, model = fit_pls(sample.X, sample.y, K, language, dimension)
        return gradient, model, cv_errors, cv_ses

    def cached_gradient(self, language: str, dimension: str) -> Gradient:
        key = (language, dimension)
        with self._gradient_lock:
            if key in self._gradients:
                return self._gradients[key]
        gradient = self.selected_gradient(language, dimension)[0]
        with self._gradient_lock:
            self._gradients.setdefault(key, gradient)
            return self._gradients[key]

    def fit_unit(self, unit: Tuple[str, str], inner_workers: int = 1) -> Dict[str, Any]:
        """
        Fit, validate and serialize one (language, dimension) gradient.

        Returns:
            The fit record written to the report
        """
        language, dimension = unit
        sample = self.samples[unit]
        t = self.config.tests

        gradient, model, cv_errors, cv_ses = self.selected_gradient(language, dimension)
        report = corrected_t_test(
            sample.X, sample.y, gradient.K, t.n_splits, t.test_fraction, self.config.seed,
            workers=inner_workers,
        )
        report.in_sample_r_squared = r_squared(sample.y, model.predict(sample.X))
        report.cv_errors = cv_errors
        report.cv_standard_errors = cv_ses
        label_variance = float(np.var(sample.y))
        if label_variance > 0 and np.isfinite(cv_errors[gradient.K - 1]):
            report.cv_r_squared = 1.0 - cv_errors[gradient.K - 1] / label_variance
        gradient = gradient.with_fit(report)
        with self._gradient_lock:
            self._gradients[unit] = gradient

        record = fit_record(gradient, sample.n, self.config.model, sample.dropped_oov)
        space = self.spaces[language]
        record['poles'] = {
            POSITIVE: [[w, c] for w, c in nearest_words(space, gradient.direction, RENDERED_WORDS)],
            NEGATIVE: [[w, c] for w, c in nearest_words(space, -gradient.direction, RENDERED_WORDS)],
        }
        record['join'] = join_summary(sample)
        record['seed'] = self.config.seed
        record['config'] = self.provenance
        self.writer.write_json(fit_report_name(language, dimension), record)

        self.writer.write_vectors(
            f"fit/{language}_{dimension}_gradient.vec",
            EmbeddingSpace(language, (f"{language}:{dimension}",), gradient.direction[None, :]),
        )
        self._update_stats('units')
        self._update_stats('reports', 2)
        return record

    def compare_unit(self, unit: Tuple[Tuple[str, str], str], inner_workers: int = 1) -> Dict[str, Any]:
        """
        Alignment test, difference test and bootstrap interval for one (pair, dimension).

        Returns:
            The comparison record written to the report
        """
        (a, b), dimension = unit
        sample_a, sample_b = self.samples[(a, dimension)], self.samples[(b, dimension)]
        t = self.config.tests
        seed = self.config.seed

        alignment = alignment_test(sample_a, sample_b, t.n_permutations, seed, inner_workers)
        difference = difference_test(sample_a, sample_b, t.n_permutations, seed, inner_workers)
        boot = bootstrap_interval(sample_a, sample_b, t.n_bootstrap, seed, inner_workers)

        g_a = self.cached_gradient(a, dimension)
        g_b = self.cached_gradient(b, dimension)
        outcome = verdict(alignment.p_value, difference.p_value, t.alpha)

        record = {
            'pair': [a, b],
            'dimension': dimension,
            'seed': seed,
            'alpha': t.alpha,
            'verdict': outcome,
            'rho': {
                'k1': alignment.rho_observed,
                'selected': cosine(g_a, g_b),
                'K_a': g_a.K,
                'K_b': g_b.K,
            },
            'alignment_test': {
                'test': 'alignment',
                'tail': alignment.tail,
                'rho_observed': alignment.rho_observed,
                'p_value': alignment.p_value,
                'n': alignment.n,
                'null_histogram': null_histogram(alignment.null_samples, t.histogram_bins),
            },
            'difference_test': {
                'test': 'difference',
                'tail': difference.tail,
                'rho_observed': difference.rho_observed,
                'p_value': difference.p_value,
                'n': difference.n,
                'null_histogram': null_histogram(difference.null_samples, t.histogram_bins),
            },
            'bootstrap': {
                'test': 'bootstrap',
                'rho_observed': boot.rho_observed,
                'sigma_z': boot.sigma_z,
                'ci': [boot.ci_low, boot.ci_high],
                'z_critical': Z_CRITICAL,
                'B': boot.B,
                'replicate_histogram': null_histogram(boot.replicate_rhos, t.histogram_bins),
            },
            'joins': [join_summary(sample_a), join_summary(sample_b)],
            'composition': composition_diagnostics(sample_a, sample_b, self.config.translations),
            'config': self.provenance,
        }
        self.writer.write_json(compare_report_name((a, b), dimension), record)
        logger.info(f"{a}-{b}/{dimension}: {outcome}")
        self._update_stats('units')
        self._update_stats('reports')
        return record

    def cluster_gradients(self, pair: Tuple[str, str], dimension: str) -> Tuple[Gradient, Gradient]:
        if self.config.tests.cluster_gradient == 'k1':
            return tuple(
                closed_form_pls1(self.samples[(l, dimension)].X, self.samples[(l, dimension)].y, l, dimension)
                for l in pair
            )
        return self.cached_gradient(pair[0], dimension), self.cached_gradient(pair[1], dimension)

    def cluster_unit(
        self,
        unit: Tuple[Tuple[str, str], str],
        inner_workers: int = 1,
        p_diff: Optional[float] = None,
        forced: bool = False
    ) -> List[Dict[str, Any]]:
        """
        Cluster both poles of the difference gradient in each language's vocabulary.

        Returns:
            One record per (vocabulary, pole)
        """
        pair, dimension = unit
        t = self.config.tests
        k_min, k_max = t.k_range
        g_a, g_b = self.cluster_gradients(pair, dimension)
        dg = difference_gradient(g_a, g_b)

        records = []
        for vocabulary in pair:
            space = self.spaces[vocabulary]
            positive = select_pole_candidates(space, dg, POSITIVE, t.m_candidates)
            negative = select_pole_candidates(space, dg, NEGATIVE, t.m_candidates)
            if t.single_pass_clustering:
                reports = cluster_poles_jointly(
                    positive, negative, space, dg, k_min, k_max, self.config.seed,
                    restarts=t.kmeans_restarts, workers=inner_workers,
                )
            else:
                reports = tuple(
                    cluster_pole(
                        words, space, dg, k_min, k_max, self.config.seed, pole=pole,
                        restarts=t.kmeans_restarts, workers=inner_workers,
                    )
                    for pole, words in ((POSITIVE, positive), (NEGATIVE, negative))
                )
            for report in reports:
                record = cluster_record(report, pair, dimension)
                record.update({
                    'M': t.m_candidates,
                    'gradient': t.cluster_gradient,
                    'single_pass': t.single_pass_clustering,
                    'difference_p_value': p_diff,
                    'forced': forced,
                    'seed': self.config.seed,
                    'config': self.provenance,
                })
                base = cluster_report_name(pair, dimension, vocabulary, report.pole)
                self.writer.write_json(base + '.json', record)
                self.writer.write_text(base + '.txt', render_clusters(record))
                self._update_stats('reports', 2)
                records.append(record)
        self._update_stats('units')
        return records

    def run_units(self, func, units: List[Any], label: str) -> List[Any]:
        inner = self._inner_workers(len(units))
        return run_ordered(lambda unit: func(unit, inner), units, workers=self.workers, label=label)

    def finish(self) -> str:
        path = self.writer.write_manifest(self.provenance)
        logger.info(f"Run complete: {self.stats['units']} unit(s), {self.stats['reports']} report file(s)")
        return path


def cluster_record(report: ClusterReport, pair: Tuple[str, str], dimension: str) -> Dict[str, Any]:
    return {
        'pair': list(pair),
        'dimension': dimension,
        'pole': report.pole,
        'vocabulary_source': report.vocabulary_source,
        'k': report.k,
        'silhouette': report.silhouette,
        'silhouette_by_k': {str(k): s for k, s in sorted(report.silhouette_by_k.items())},
        'inertia': report.inertia,
        'clusters': [
            {'n': c.n, 'centroid_cos': c.centroid_cos, 'coherence': c.coherence, 'words': c.words}
            for c in report.clusters
        ],
    }


def render_clusters(record: Dict[str, Any]) -> str:
    """Plain-text listing of one pole's clusters, ten words per cluster."""
    a, b = record['pair']
    lines = [
        f"Neighbours in {record['vocabulary_source']} vocabulary: {a} - {b}, {record['dimension']}, "
        f"{record['pole']} pole (k={record['k']}, silhouette={record['silhouette']:.3f})",
    ]
    for index, cluster in enumerate(record['clusters'], start=1):
        words = ', '.join(cluster['words'][:RENDERED_WORDS])
        more = ', ...' if cluster['n'] > RENDERED_WORDS else ''
        lines.append(
            f"  {index}. n={cluster['n']}, cos={cluster['centroid_cos']:.3f}, "
            f"coh.={cluster['coherence']:.3f}: {words}{more}"
        )
    return '\n'.join(lines) + '\n'


def cmd_fit(config: RunConfig, workers: int = 1) -> CommandResult:
    """Fit, validate and serialize every (language, dimension) gradient."""
    config.validate()
    pipeline = GradientPipeline(config, workers)
    pipeline.load()
    units = pipeline.language_units()
    records = pipeline.run_units(pipeline.fit_unit, units, 'fit units')
    paths = [pipeline.writer.path(fit_report_name(*unit)) for unit in units]
    paths.append(pipeline.finish())
    return CommandResult('fit', paths=paths, records=records)


def cmd_compare(config: RunConfig, workers: int = 1) -> CommandResult:
    """
    Run both permutation tests and the bootstrap for every (pair, dimension).

    The exit code reflects the least favourable verdict across units.
    """
    config.validate(require_pairs=True)
    pipeline = GradientPipeline(config, workers)
    pipeline.load(_languages_in_pairs(config))
    units = pipeline.pair_units()
    records = pipeline.run_units(pipeline.compare_unit, units, 'compare units')
    paths = [pipeline.writer.path(compare_report_name(*unit)) for unit in units]
    paths.append(pipeline.finish())
    return CommandResult(
        'compare',
        paths=paths,
        exit_code=verdict_exit_code([r['verdict'] for r in records]),
        records=records,
    )


def cmd_cluster(config: RunConfig, workers: int = 1, force: bool = False) -> CommandResult:
    """
    Cluster the difference-gradient poles of every (pair, dimension).

    Requires a compare report with a significant difference test for each
    unit unless forced.

    Raises:
        ConfigurationError: A unit lacks a significant difference test and force is off
    """
    config.validate(require_pairs=True)
    pipeline = GradientPipeline(config, workers)
    pipeline.load(_languages_in_pairs(config))
    units = pipeline.pair_units()
    writer = pipeline.writer
    alpha = config.tests.alpha

    p_values: Dict[Tuple[Tuple[str, str], str], Optional[float]] = {}
    refused = []
    for unit in units:
        name = compare_report_name(*unit)
        if os.path.exists(writer.path(name)):
            p_values[unit] = float(writer.read_json(name)['difference_test']['p_value'])
        else:
            p_values[unit] = None
        if p_values[unit] is None or p_values[unit] > alpha:
            refused.append(f"{unit[0][0]}-{unit[0][1]}/{unit[1]} (p_diff={p_values[unit]})")
    if refused and not force:
        raise ConfigurationError(
            f"Difference not significant at alpha={alpha} (or not yet tested) for: {', '.join(refused)}; "
            f"run compare first or pass --force"
        )
    if refused:
        logger.warning(f"Forced clustering despite non-significant differences: {', '.join(refused)}")

    nested = pipeline.run_units(
        lambda unit, inner: pipeline.cluster_unit(unit, inner, p_values[unit], force),
        units,
        'cluster units',
    )
    records = [record for unit_records in nested for record in unit_records]
    paths = [
        pipeline.writer.path(cluster_report_name(tuple(r['pair']), r['dimension'], r['vocabulary_source'], r['pole']) + '.json')
        for r in records
    ]
    paths.append(pipeline.finish())
    return CommandResult('cluster', paths=paths, records=records)


def _languages_in_pairs(config: RunConfig) -> List[str]:
    seen = []
    for pair in config.language_pairs():
        for language in pair:
            if language not in seen:
                seen.append(language)
    return seen


def cmd_synth(spec: SynthSpec, out_dir: str) -> CommandResult:
    """Generate a synthetic dataset and a ready-to-run config into out_dir."""
    dataset = generate(spec)
    paths = write_dataset(dataset, out_dir)
    return CommandResult('synth', paths=sorted(paths.values()))


def _read_reports(writer: ReportWriter, folder: str) -> List[Dict[str, Any]]:
    return [
        writer.read_json(name)
        for name in writer.report_files()
        if name.startswith(folder + '/') and name.endswith('.json')
    ]


def cmd_report(output_dir: str) -> CommandResult:
    """
    Summarize the fit, compare and cluster reports of an output directory as text.

    Raises:
        ConfigurationError: The directory holds no reports
    """
    if not os.path.isdir(output_dir):
        raise ConfigurationError(f"Output directory does not exist: {output_dir}")
    writer = ReportWriter(output_dir)
    fits = _read_reports(writer, 'fit')
    comparisons = _read_reports(writer, 'compare')
    clusters = _read_reports(writer, 'cluster')
    if not (fits or comparisons or clusters):
        raise ConfigurationError(f"No reports found in {output_dir}; run fit, compare or cluster first")

    sections = []
    if fits:
        table = pd.DataFrame([
            {
                'language': r['language'],
                'model': r['model'],
                'N': r['N'],
                'dimension': r['dimension'],
                'K': r['K'],
                'R2': _fmt(r['r_squared']),
                'R2 in-sample': _fmt(r['in_sample_r_squared']),
                'p': _fmt_p(r['p_value']),
                'r_pred': _fmt(r['r_pred']),
            }
            for r in fits
        ])
        sections.append('Gradient fits\n' + table.to_string(index=False))
    if comparisons:
        table = pd.DataFrame([
            {
                'pair': '-'.join(r['pair']),
                'dimension': r['dimension'],
                'rho (K=1)': _fmt(r['rho']['k1']),
                'rho (selected K)': _fmt(r['rho']['selected']),
                'p_align': _fmt_p(r['alignment_test']['p_value']),
                'p_diff': _fmt_p(r['difference_test']['p_value']),
                'CI': f"[{_fmt(r['bootstrap']['ci'][0], 2)}, {_fmt(r['bootstrap']['ci'][1], 2)}]",
                'verdict': r['verdict'],
            }
            for r in comparisons
        ])
        sections.append('Cross-lingual comparisons\n' + table.to_string(index=False))
    for record in clusters:
        sections.append(render_clusters(record).rstrip('\n'))

    path = writer.write_text('report.txt', '\n\n'.join(sections) + '\n')
    logger.info(f"Wrote summary of {len(fits)} fit, {len(comparisons)} compare and {len(clusters)} cluster reports")
    return CommandResult('report', paths=[path])


def _fmt(value: Any, digits: int = 3) -> str:
    if value is None:
        return '-'
    if isinstance(value, str):
        return value
    return f"{value:.{digits}f}"


def _fmt_p(value: Any) -> str:
    if isinstance(value, (int, float)) and value < 0.001:
        return '<0.001'
    return _fmt(value)
