"""Data fusion of author rankings from different strategies."""

from __future__ import annotations

from .runs import RankedRun

SCORE_METHODS = ("combsum", "combmin", "combmax")
RANK_METHODS = ("rrm", "rrs")
FUSION_METHODS = SCORE_METHODS + RANK_METHODS
MISSING_RANK_MODES = ("len_plus_one", "skip")


def _normalized_scores(run: RankedRun) -> dict[str, float]:
    if not run.entries:
        return {}
    values = [e.score for e in run.entries]
    low, high = min(values), max(values)
    if high == low:
        return {e.author_id: 1.0 for e in run.entries}
    return {e.author_id: (e.score - low) / (high - low) for e in run.entries}


def fuse(runs: list[RankedRun], method: str, *, normalize: bool = True,
         missing_rank: str = "len_plus_one") -> RankedRun:
    """Combine rankings of the same query into one.

    Score-based methods (combsum, combmin, combmax) treat an author missing
    from a run as score 0; with `normalize` each input run is min-max scaled
    to [0, 1] first (a constant run maps to all 1.0). Rank-based methods (rrm:
    product of inverse ranks; rrs: inverse of the rank sum) give a missing
    author rank len(run)+1, or skip that run entirely with
    `missing_rank="skip"`.
    """
    if not runs:
        raise ValueError("fuse requires at least one input run")
    if method not in FUSION_METHODS:
        raise ValueError(f"unknown fusion method {method!r}; choose from {', '.join(FUSION_METHODS)}")
    if missing_rank not in MISSING_RANK_MODES:
        raise ValueError(f"unknown missing_rank mode {missing_rank!r}")
    query_id = runs[0].query_id
    if any(r.query_id != query_id for r in runs):
        raise ValueError("all runs must belong to the same query")

    universe: set[str] = set()
    for run in runs:
        universe.update(run.author_ids)

    fused: dict[str, float] = {}
    if method in SCORE_METHODS:
        per_run = [_normalized_scores(r) if normalize
                   else {e.author_id: e.score for e in r.entries} for r in runs]
        for author in universe:
            values = [scores.get(author, 0.0) for scores in per_run]
            if method == "combsum":
                fused[author] = sum(values)
            elif method == "combmin":
                fused[author] = min(values)
            else:
                fused[author] = max(values)
    else:
        for author in universe:
            ranks = []
            for run in runs:
                rank = run.rank_of(author)
                if rank is None:
                    if missing_rank == "skip":
                        continue
                    rank = len(run) + 1
                ranks.append(rank)
            if not ranks:
                fused[author] = 0.0
            elif method == "rrm":
                product = 1.0
                for rank in ranks:
                    product *= 1.0 / rank
                fused[author] = product
            else:
                fused[author] = 1.0 / sum(ranks)
    return RankedRun.from_scores(query_id, fused)
