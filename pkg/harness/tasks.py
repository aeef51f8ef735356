"""
Celery tasks fanning a seed batch out to workers.

With CELERY_TASK_ALWAYS_EAGER (the default in settings) the batch runs
in-process, so management commands work without a broker.
"""

import logging

from celery import group, shared_task

from .challenge import challenge_config, summarize
from .config import run_config_from_dict
from .report import report_from_trace
from .runner import run_one

logger = logging.getLogger(__name__)


@shared_task
def run_seed_task(config_data, seed, out_dir=None):
    """Run one seed from a serialized RunConfig; returns the report as a dict."""
    config = run_config_from_dict(config_data)
    return run_one(config, seed, out_dir).to_dict()


def run_batch(config, out_dir=None):
    """
    Run every seed of ``config`` and return their MatchReports in seed order.

    Seeds are independent; each worker writes its own trace file.
    """
    out_dir = str(out_dir or config.output_path)
    config_data = config.to_dict()
    logger.info(f"Dispatching {len(config.seeds)} seed(s) of {config.scenario.name} to {out_dir}")
    job = group([run_seed_task.s(config_data, seed, out_dir) for seed in config.seeds])
    result = job.apply_async()
    payloads = [r.get(disable_sync_subtasks=False) for r in result.results]
    payloads = sorted(payloads, key=lambda payload: payload['seed'])
    return [report_from_trace(payload['trace_path']) for payload in payloads]


def run_challenge(config, d_ramp, speed, foot=None, out_dir=None):
    """
    Moving-ball batch at one ramp distance and release speed.

    Returns:
        (reports, ChallengeSummary)
    """
    config = challenge_config(config, d_ramp, speed, foot)
    reports = run_batch(config, out_dir)
    return reports, summarize(r.challenge for r in reports if r.challenge is not None)
