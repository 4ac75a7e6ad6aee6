"""Persistence of architecture datasets and search histories as JSON lines"""
import json
from pathlib import Path
from typing import Dict, Iterable, List, Union
from pydantic import ValidationError as SchemaValidationError
from exceptions import ParseError, WriteError
from models.arch_sample import ArchSample
from models.search_record import SearchRecord


def _dump_line(data: Dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


class DatasetManager:
    """Reads and writes JSONL artifacts, caching parsed datasets by path"""

    def __init__(self):
        self.datasets: Dict[str, List[ArchSample]] = {}

    def _write_lines(self, lines: Iterable[str], path: Path) -> Path:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                for line in lines:
                    f.write(line + "\n")
        except OSError as e:
            raise WriteError(f"Could not write {path}: {e}") from e
        return path

    def save_dataset(self, samples: List[ArchSample], path: Union[str, Path]) -> Path:
        """One ArchSample per line, keys sorted"""
        path = Path(path)
        self._write_lines((_dump_line(s.to_dict()) for s in samples), path)
        self.datasets[str(path)] = list(samples)
        return path

    def load_dataset(self, path: Union[str, Path], use_cache: bool = True) -> List[ArchSample]:
        """Parse a dataset file; malformed rows raise ParseError with their line number"""
        key = str(Path(path))
        if use_cache and key in self.datasets:
            return self.datasets[key]

        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"Unreadable dataset: {e}", path=key) from e

        samples = []
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                samples.append(ArchSample.from_dict(json.loads(line)))
            except (json.JSONDecodeError, SchemaValidationError) as e:
                raise ParseError(f"Invalid sample: {e}", path=key, line=line_no) from e

        self.datasets[key] = samples
        return samples

    def save_history(self, records: List[SearchRecord], path: Union[str, Path]) -> Path:
        """Search history, one SearchRecord per line in insertion order"""
        return self._write_lines((_dump_line(r.to_dict()) for r in records), Path(path))

    def clear(self):
        self.datasets.clear()


# Global instance
dataset_manager = DatasetManager()
