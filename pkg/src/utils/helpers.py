"""
Helper utilities for topo-sft.

Provides formatting and parsing helpers shared by the command-line
harness and the benchmark reports.
"""

from typing import List

from .exceptions import UsageError


def format_duration(seconds: float, format: str = 'human') -> str:
    """
    Format duration in seconds to human-readable string.

    Args:
        seconds: Duration in seconds
        format: Format type ('human', 'hms')

    Returns:
        Formatted duration string
    """
    if format == 'human':
        # Human-readable format (e.g., "1h 23m 45s"); sub-minute runs keep decimals
        if seconds < 60:
            return f"{seconds:.2f}s"
        hours = int(seconds // 3600)
        minutes = int((seconds % 3600) // 60)
        secs = int(seconds % 60)

        parts = []
        if hours > 0:
            parts.append(f"{hours}h")
        if minutes > 0:
            parts.append(f"{minutes}m")
        if secs > 0 or not parts:
            parts.append(f"{secs}s")

        return " ".join(parts)

    elif format == 'hms':
        hours = int(seconds // 3600)
        minutes = int((seconds % 3600) // 60)
        secs = int(seconds % 60)

        if hours > 0:
            return f"{hours:02d}:{minutes:02d}:{secs:02d}"
        return f"{minutes:02d}:{secs:02d}"

    return str(seconds)


def parse_seed_list(text: str) -> List[int]:
    """
    Parse a seed list such as "42", "1..5" or "1,3,7..9".

    Args:
        text: Comma-separated seeds and inclusive ranges

    Returns:
        Seeds in the order given, duplicates removed

    Raises:
        UsageError: If the text cannot be parsed
    """
    seeds: List[int] = []
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        try:
            if '..' in part:
                start_text, end_text = part.split('..', 1)
                start, end = int(start_text), int(end_text)
                if end < start:
                    raise ValueError(f"empty range {part}")
                values = range(start, end + 1)
            else:
                values = range(int(part), int(part) + 1)
        except ValueError as e:
            raise UsageError(f"Invalid seed list '{text}': {e}", {'seeds': text})
        for seed in values:
            if seed < 0:
                raise UsageError(f"Seeds must be non-negative: {seed}", {'seeds': text})
            if seed not in seeds:
                seeds.append(seed)
    if not seeds:
        raise UsageError("Seed list is empty", {'seeds': text})
    return seeds


def relative_improvement(baseline: float, refined: float) -> float:
    """
    Percentage improvement of refined over baseline (positive is better).

    Returns 0.0 when the baseline is zero.
    """
    if baseline == 0:
        return 0.0
    return 100.0 * (baseline - refined) / baseline
