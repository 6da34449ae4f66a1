"""The verify-all suite

Checks are plain functions taking the scale ``n`` and the settings, and
registered with the `check` decorator. A check passes by returning, and
fails by raising `CheckFailedError` (usually through `require`). Any other
exception marks the check as an error.

Each check runs inside a `CheckRun`, which records its status and timing
and captures everything logged under ``chainsemi`` while it runs.

Where a claimed formula or generating set is off, the check asserts what
is actually true and logs the difference as a warning.
"""

from __future__ import annotations

import logging
import math
import time
from collections import deque
from functools import partial
from typing import Callable, Dict, List, MutableSequence, Optional

import numpy as np

from . import closure, enumeration, families, maximal
from .exceptions import CheckFailedError, ParameterError
from .factorize import factorize_iord, factorize_pord, observations
from .families import FamilyLabel, Regime, Side
from .reports import CheckRecord, CheckStatus, LogRecordModel, SuiteReport
from .settings import ChainsemiSettings, resolve
from .transforms import (
    ChainMap,
    SemigroupClass,
    classify,
    member_of,
    ord_degree,
    restrict,
)
from .types.chainmap import words_to_maps

logger = logging.getLogger(__name__)

CheckFunction = Callable[[int, ChainsemiSettings], None]


class RegisteredCheck:
    def __init__(self, func: CheckFunction, name: str, description: str):
        self.func = func
        self.name = name
        self.description = description


REGISTRY: Dict[str, RegisteredCheck] = {}


def mark_check(
    func: CheckFunction, name: Optional[str] = None, description: Optional[str] = None
) -> CheckFunction:
    """Add a function to the verify-all registry"""
    name = name or func.__name__.replace("_", "-")
    if description is None:
        description = (func.__doc__ or "").strip().split("\n")[0]
    REGISTRY[name] = RegisteredCheck(func, name, description)
    return func


def check(func: Optional[CheckFunction] = None, **kwargs):
    # Usable bare (@check) or with arguments (@check(name=...)), in which
    # case we return a partial that registers the function once.
    if func is not None:
        return mark_check(func, **kwargs)
    else:
        return partial(mark_check, **kwargs)


def require(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailedError(message)


class DequeLogHandler(logging.Handler):
    def __init__(self, dest: MutableSequence, level=logging.INFO):
        """Set up a log handler that appends records to ``dest``.

        ``dest`` is usually a bounded deque, so a chatty check keeps only
        its most recent records.
        """
        logging.Handler.__init__(self)
        self.setLevel(level)
        self.dest = dest

    def emit(self, record):
        self.dest.append(record)


class CheckRun:
    """One execution of a registered check, with its captured log."""

    def __init__(
        self,
        registered: RegisteredCheck,
        n: int,
        settings: ChainsemiSettings,
        force_failure: bool = False,
        log_len: int = 1000,
    ):
        self.registered = registered
        self.n = n
        self.settings = settings
        self.force_failure = force_failure
        self.status = CheckStatus.PENDING
        self.detail: Optional[str] = None
        self.seconds = 0.0
        self._log: deque = deque(maxlen=log_len)

    def run(self) -> CheckRecord:
        # Capture everything the package logs while the check runs
        handler = DequeLogHandler(dest=self._log)
        package_logger = logging.getLogger("chainsemi")
        previous_level = package_logger.level
        if package_logger.getEffectiveLevel() > logging.INFO:
            package_logger.setLevel(logging.INFO)
        package_logger.addHandler(handler)

        self.status = CheckStatus.RUNNING
        start = time.time()
        try:
            if self.force_failure:
                raise CheckFailedError("failure forced with --fail-check")
            self.registered.func(self.n, self.settings)
            self.status = CheckStatus.PASSED
        except CheckFailedError as e:
            logger.error(f"Check {self.registered.name} failed: {e}")
            self.status = CheckStatus.FAILED
            self.detail = str(e)
        except Exception as e:
            logger.exception(e)
            self.status = CheckStatus.ERROR
            self.detail = f"{type(e).__name__}: {e}"
        finally:
            self.seconds = time.time() - start
            package_logger.removeHandler(handler)
            package_logger.setLevel(previous_level)
        return self.record()

    def record(self) -> CheckRecord:
        return CheckRecord(
            name=self.registered.name,
            description=self.registered.description,
            status=self.status,
            detail=self.detail,
            seconds=round(self.seconds, 3),
            log=[LogRecordModel.model_validate(r) for r in self._log],
        )


def run_suite(
    n: int = 5,
    fail_check: Optional[str] = None,
    settings: Optional[ChainsemiSettings] = None,
) -> SuiteReport:
    """Run every registered check at scale ``n``."""
    settings = resolve(settings)
    if fail_check is not None and fail_check not in REGISTRY:
        raise ParameterError(
            f"No check called '{fail_check}'; choose from {', '.join(REGISTRY)}"
        )
    records = []
    for name, registered in REGISTRY.items():
        run = CheckRun(registered, n, settings, force_failure=name == fail_check)
        record = run.run()
        logger.info(f"{name}: {record.status.value} in {record.seconds:.2f}s")
        records.append(record)
    passed = all(r.status == CheckStatus.PASSED for r in records)
    return SuiteReport(n=n, passed=passed, checks=records)


def _sizes(lo: int, hi: int) -> range:
    return range(lo, hi + 1)


def _regime_pairs(n_max: int, which: Optional[Regime] = None) -> List[tuple]:
    pairs = []
    for k in _sizes(4, n_max):
        for r in _sizes(3, k - 1):
            if which is None or families.regime(k, r) == which:
                pairs.append((k, r))
    return pairs


@check
def idempotent_counts(n: int, settings: ChainsemiSettings) -> None:
    """Idempotents of PORD_n with image size r match the closed form."""
    for k in _sizes(1, min(n, settings.cap)):
        for r in _sizes(1, k):
            report = enumeration.count_idempotents(k, r, settings)
            require(report.match, f"idempotents n={k} r={r}: {report}")
    logger.warning(
        "With a single fixed point there are 2^n - 1 idempotents, "
        "not C(n,1) 2^(n-1)"
    )


@check
def max_reversing_image(n: int, settings: ChainsemiSettings) -> None:
    """The largest image in PRD_n* is n - floor(n/3), attained by the witness."""
    for k in _sizes(4, n):
        report = enumeration.max_reversing_image(k, settings)
        require(report.match, f"r_n at n={k}: {report}")


@check
def family_sizes(n: int, settings: ChainsemiSettings) -> None:
    """Generator families have their closed-form sizes and no repeats."""
    g4 = families.family(4, None, FamilyLabel.G_N).elements
    require(
        g4 == sorted([families.gamma(4, 1, 3), families.gamma(4, 2, 4)]),
        f"G_4 is {g4}",
    )
    example = families.gamma_rs(5, 3, 2, 4, 2)
    require(str(example) == "n=5:[0,2,1,4,0]", f"gamma_rs(5,3,2,4,2) = {example}")
    # family() raises if a size disagrees with its closed form
    for k in _sizes(4, max(n, 4)):
        families.family(k, None, FamilyLabel.G_N)
        for r in _sizes(2, k):
            families.family(k, r, FamilyLabel.F_R)
        for r in _sizes(3, k - 1):
            for side in Side:
                families.claimed_generators(side, k, r)


@check
def h_table(n: int, settings: ChainsemiSettings) -> None:
    """|H_n^r| counted by parameters agrees with the built family."""
    require(families.h_count(5, 3) == 6, "|H_5^3| should be 6")
    rows = enumeration.count_H_table(max(n, 5))
    for row in rows:
        if row.n <= min(n, 8):
            built = len(families.family(row.n, row.r, FamilyLabel.H_NR))
            require(built == row.count, f"H_{row.n}^{row.r}: {built} != {row.count}")


@check
def structure(n: int, settings: ChainsemiSettings) -> None:
    """|PD_n| = (n+1)!, PORD_3 = POPD_3 and PORD(n,2) = POPD(n,2)."""
    for k in _sizes(3, min(n, 7)):
        size = enumeration.count_class_size(k, SemigroupClass.PD, settings=settings)
        require(size.enumerated_count == math.factorial(k + 1), f"|PD_{k}|: {size}")
    if n >= 3:
        pord = closure.ambient_semigroup(SemigroupClass.PORD, 3, None, settings)
        popd = closure.ambient_semigroup(SemigroupClass.POPD, 3, None, settings)
        require(pord == popd, "PORD_3 differs from POPD_3")
    for k in _sizes(4, min(n, 6)):
        pord = closure.ambient_semigroup(SemigroupClass.PORD, k, 2, settings)
        popd = closure.ambient_semigroup(SemigroupClass.POPD, k, 2, settings)
        require(pord == popd, f"PORD({k},2) differs from POPD({k},2)")


def _check_generation(side: Side, n: int, settings: ChainsemiSettings) -> None:
    label = SemigroupClass.PORD if side == Side.PORD else SemigroupClass.IORD
    for k, r in _regime_pairs(min(n, 6)):
        claimed = families.claimed_generators(side, k, r)
        target = closure.ambient_semigroup(label, k, r, settings)
        generated = closure.closure(claimed.elements, settings=settings)
        require(
            generated == target,
            f"{label.value}({k},{r}): claimed set generates {len(generated)} "
            f"of {len(target)}",
        )


@check
def pord_generation(n: int, settings: ChainsemiSettings) -> None:
    """The claimed generating sets generate PORD(n,r) in both regimes."""
    _check_generation(Side.PORD, n, settings)


@check
def iord_generation(n: int, settings: ChainsemiSettings) -> None:
    """The claimed generating sets generate IORD(n,r) in both regimes."""
    _check_generation(Side.IORD, n, settings)


@check
def undecomposables(n: int, settings: ChainsemiSettings) -> None:
    """Undecomposable elements against the claimed generating sets."""
    for k, r in _regime_pairs(min(n, 5), Regime.LARGE):
        pord = closure.ambient_semigroup(SemigroupClass.PORD, k, r, settings)
        found = set(closure.undecomposables(pord, settings))
        idempotents = set(families.family(k, r, FamilyLabel.E_R).elements)
        require(idempotents <= found, f"some of E_{r} is decomposable in PORD({k},{r})")

        iord = closure.ambient_semigroup(SemigroupClass.IORD, k, r, settings)
        found = set(closure.undecomposables(iord, settings))
        claimed = set(families.claimed_generators(Side.IORD, k, r).elements)
        singletons = set(families.family(k, r, FamilyLabel.GIC_K, k=2).elements)
        require(found <= claimed, f"IORD({k},{r}) has unclaimed undecomposables")
        require(
            claimed - found == singletons,
            f"IORD({k},{r}): decomposable claimed elements are "
            f"{sorted(claimed - found)}",
        )
        require(
            closure.rank_if_determined(iord, settings) == len(found),
            f"the undecomposables of IORD({k},{r}) do not generate it",
        )
        logger.warning(
            f"IORD({k},{r}): the {len(singletons)} maps zeta_{{b}} are "
            "decomposable, so the claimed set is not minimal; "
            f"the rank is {len(found)}"
        )


@check
def gamma_criteria(n: int, settings: ChainsemiSettings) -> None:
    """Undecomposability of gamma_{p,q} in PORD_n and IORD_n."""
    for k in _sizes(4, min(n, 6)):
        for q in _sizes(3, k):
            for p in _sizes(1, q - 2):
                require(
                    closure.check_gamma_undecomposable(k, p, q, "pord", settings),
                    f"the dom criterion fails for gamma({k},{p},{q}) in PORD_{k}",
                )
        for p, q in families.g_parameters(k):
            require(
                closure.check_gamma_undecomposable(k, p, q, "iord", settings),
                f"gamma({k},{p},{q}) is decomposable in IORD_{k}",
            )
    if n >= 6:
        iord = closure.ambient_semigroup(SemigroupClass.IORD, 6, 3, settings)
        found = set(closure.undecomposables(iord, settings))
        for p, q, s in families.h_parameters(6, 3):
            if min(3 - s, q - p, 6 - q + 1) == 3 - s:
                g = families.gamma_rs(6, 3, p, q, s)
                require(g in found, f"{g} is decomposable in IORD(6,3)")
    # a decomposition in IORD(9,5), checked without building the semigroup
    target = families.gamma_rs(9, 5, 5, 7, 1)
    left = ChainMap.partial_identity(9, [5, 7, 8])
    right = ChainMap.from_pairs(9, {5: 5, 6: 4, 7: 7, 8: 6})
    require(
        closure.is_decomposition(target, left, right, SemigroupClass.IORD, 5),
        f"{target} = {left} * {right} does not hold in IORD(9,5)",
    )


@check
def maximal_subsemigroups(n: int, settings: ChainsemiSettings) -> None:
    """Claimed maximal subsemigroups at n = 5 (or n, if smaller)."""
    k = min(max(n, 4), 5)
    ambients = [maximal.Ambient(side=Side.PORD, n=k, r=r) for r in _sizes(3, k)]
    for ambient in ambients:
        for report in maximal.verify_all(ambient, settings):
            require(report.passed, f"{report.name}: {report.witness}")

    for r in _sizes(3, k - 1):
        ambient = maximal.Ambient(side=Side.IORD, n=k, r=r)
        iord = closure.ambient_semigroup(SemigroupClass.IORD, k, r, settings)
        found = set(closure.undecomposables(iord, settings))
        for report in maximal.verify_all(ambient, settings):
            variant = report.descriptor.variant
            if isinstance(variant, maximal.RemoveSingleGenerator):
                expected = variant.element in found
                require(
                    report.passed == expected,
                    f"{report.name}: passed={report.passed}, but the element "
                    f"is {'un' if expected else ''}decomposable",
                )
                if not expected:
                    logger.warning(f"{report.name} is not closed: {report.witness}")
            else:
                require(report.passed, f"{report.name}: {report.witness}")


@check
def rank_identities(n: int, settings: ChainsemiSettings) -> None:
    """Necessity classes pin the rank of PORD(n,r) and PORD_n."""
    for k, r in _regime_pairs(min(n, 6), Regime.LARGE):
        report = maximal.necessity_rank_check(k, r, Side.PORD, settings)
        require(report.match, f"PORD({k},{r}): {report.notes}")
    for k in _sizes(4, min(n, 6)):
        report = maximal.whole_monoid_rank_check(k, Side.PORD, settings)
        require(report.match, f"PORD_{k}: {report.notes}")
    for k, r in _regime_pairs(min(n, 5), Regime.LARGE):
        report = maximal.necessity_rank_check(k, r, Side.IORD, settings)
        missing = (report.formula_value or 0) - report.enumerated_count
        require(
            missing == k - 2,
            f"IORD({k},{r}): expected {k - 2} non-closed classes, got {missing}",
        )
        logger.warning(
            f"IORD({k},{r}): {report.enumerated_count} necessity classes "
            f"against the formula value {report.formula_value}"
        )


@check
def map_properties(n: int, settings: ChainsemiSettings) -> None:
    """Exhaustive properties of single maps: orientation, fixed points, degrees."""
    for k in _sizes(1, min(n, 6)):
        profile = enumeration.profile_words(enumeration.all_words(k, settings))
        oriented = profile.orientation_preserving | profile.orientation_reversing
        both = profile.orientation_preserving & profile.orientation_reversing
        require(
            not np.any(oriented & (both != (profile.image_size <= 2))),
            f"n={k}: an oriented map has both orientations without image <= 2",
        )
        require(
            not enumeration.endpoint_mismatches(profile).any(),
            f"n={k}: the endpoint test misjudges an oriented map",
        )
    logger.warning(
        "Orientation alone does not let the endpoints decide monotonicity: "
        "gamma(4,1,3) has (min dom)a < (max dom)a but is not order-preserving"
    )

    for k in _sizes(1, min(n, 5)):
        words = enumeration.enumerate_words(k, SemigroupClass.PD, settings=settings)
        points = np.arange(1, k + 1)
        fixed = words == points
        extended = np.concatenate(
            [np.zeros((len(words), 1), dtype=np.int64), words], axis=1
        )
        for row, word in enumerate(words):
            # row `row` times every word, applying `word` first
            products = extended[:, word]
            require(
                np.array_equal(products == points, fixed[row] & fixed),
                f"fix of a product differs from the meet of fixes for "
                f"{words_to_maps(words[row : row + 1])[0]}",
            )

    for k in _sizes(1, min(n, 7)):
        words = enumeration.enumerate_words(k, SemigroupClass.PORD, settings=settings)
        profile = enumeration.profile_words(words)
        star = enumeration.class_mask(profile, SemigroupClass.PORD_STAR)
        fix_sizes = (words == np.arange(1, k + 1)).sum(axis=1)
        require(
            not np.any(star & (fix_sizes > 2)),
            f"a map in PORD_{k}* has more than two fixed points",
        )
        require(
            not np.any(profile.idempotent & ~profile.orientation_preserving),
            f"PORD_{k} has an idempotent outside POPD_{k}",
        )

    # ord_degree raises InconsistencyError if some map has no degree
    for k in _sizes(4, min(n, 6)):
        words = enumeration.enumerate_words(
            k, SemigroupClass.PORD_STAR, settings=settings
        )
        for a in words_to_maps(words):
            m = ord_degree(a)
            if not member_of(a, SemigroupClass.PRD_STAR):
                continue
            bound = (m + 1) // 2
            require(
                restrict(a, range(1, m + 1)).rank <= bound,
                f"{a} with ord {m} has a prefix image larger than {bound}",
            )


def _factor_corpus(
    label: SemigroupClass, k: int, r: int, settings: ChainsemiSettings
) -> List[ChainMap]:
    words = enumeration.enumerate_words(k, label, r, settings)
    profile = enumeration.profile_words(words)
    return words_to_maps(words[profile.image_size >= 3])


@check
def factorization(n: int, settings: ChainsemiSettings) -> None:
    """Every map of PORD(n,r)* and IORD(n,r)* splits as beta gamma delta."""
    k = min(max(n, 4), 6)
    for r in _sizes(3, k - 1):
        sources = set(families.claimed_generators(Side.PORD, k, r).elements)
        for side, label, factorize in (
            (Side.PORD, SemigroupClass.PORD_STAR, factorize_pord),
            (Side.IORD, SemigroupClass.IORD_STAR, factorize_iord),
        ):
            corpus = _factor_corpus(label, k, r, settings)
            for a in corpus:
                f = factorize(a, r)
                require(observations(f).all_hold, f"observations fail for {a}")
                require(f.gamma_source.map in sources, f"unexpected source for {a}")
                gamma = classify(f.gamma)
                require(
                    gamma.orientation_reversing and gamma.image_size == f.t,
                    f"gamma of {a} is {f.gamma}",
                )
                beta_label = SemigroupClass.POPD
                delta_label = SemigroupClass.PC
                if side == Side.IORD:
                    beta_label, delta_label = SemigroupClass.IOPD, SemigroupClass.IC
                require(
                    classify(f.beta).member_of(beta_label)
                    and classify(f.delta).member_of(delta_label)
                    and f.beta.rank <= r
                    and f.delta.rank <= r,
                    f"factors of {a} fall outside their classes",
                )
            logger.info(f"Factorized {len(corpus)} maps of {label.value}({k},{r})")
