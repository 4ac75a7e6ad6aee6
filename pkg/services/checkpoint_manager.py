"""Predictor checkpoints: u32 header length, JSON header, little-endian f32 tensors"""
import json
from pathlib import Path
from typing import Dict, Union
import numpy as np
from pydantic import ValidationError as SchemaValidationError
from exceptions import ParseError, WriteError
from predictor import DSPredictor
from schemas import CheckpointHeader, TensorSpec


class CheckpointManager:
    """Saves and restores predictors; restored predictors are kept by path"""

    def __init__(self):
        self.predictors: Dict[str, DSPredictor] = {}

    def header(self, p: DSPredictor) -> CheckpointHeader:
        return CheckpointHeader(
            mode=p.mode,
            dim=p.dim,
            vocab=p.vocab,
            n_dense=p.n_dense,
            n_tokens=p.n_tokens,
            tower_widths=p.tower_widths,
            head_widths=p.head_widths,
            dropout=p.dropout,
            target_mean=p.target_mean,
            target_std=p.target_std,
            tensors=[TensorSpec(name=name, shape=list(t.shape)) for name, t in p.params.items()]
        )

    def save(self, p: DSPredictor, path: Union[str, Path]) -> Path:
        path = Path(path)
        header = json.dumps(self.header(p).model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        header_bytes = header.encode("utf-8")

        chunks = [np.array([len(header_bytes)], dtype="<u4").tobytes(), header_bytes]
        chunks.extend(np.ascontiguousarray(t, dtype="<f4").tobytes() for t in p.params.values())
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(b"".join(chunks))
        except OSError as e:
            raise WriteError(f"Could not write checkpoint to {path}: {e}") from e

        self.predictors[str(path)] = p
        return path

    def load(self, path: Union[str, Path], use_cache: bool = False) -> DSPredictor:
        key = str(Path(path))
        if use_cache and key in self.predictors:
            return self.predictors[key]

        try:
            raw = Path(path).read_bytes()
        except OSError as e:
            raise ParseError(f"Unreadable checkpoint: {e}", path=key) from e
        if len(raw) < 4:
            raise ParseError("Truncated checkpoint header", path=key, offset=len(raw))

        header_len = int(np.frombuffer(raw, dtype="<u4", count=1)[0])
        try:
            header = CheckpointHeader.model_validate_json(raw[4:4 + header_len])
        except SchemaValidationError as e:
            raise ParseError(f"Invalid checkpoint header: {e}", path=key, offset=4) from e

        p = DSPredictor(
            mode=header.mode,
            vocab=header.vocab,
            dim=header.dim,
            n_dense=header.n_dense,
            n_tokens=header.n_tokens,
            dropout=header.dropout
        )
        p.target_mean = header.target_mean
        p.target_std = header.target_std

        offset = 4 + header_len
        expected_names = list(p.params)
        if [t.name for t in header.tensors] != expected_names:
            raise ParseError("Checkpoint tensors do not match the predictor layout", path=key, offset=4)

        for spec in header.tensors:
            target = p.params[spec.name]
            if tuple(spec.shape) != target.shape:
                raise ParseError(f"{spec.name} has shape {spec.shape}, expected {list(target.shape)}", path=key)
            size = int(np.prod(spec.shape))
            if offset + 4 * size > len(raw):
                raise ParseError(f"Truncated tensor {spec.name}", path=key, offset=offset)
            target[...] = np.frombuffer(raw, dtype="<f4", count=size, offset=offset).reshape(target.shape)
            offset += 4 * size

        if offset != len(raw):
            raise ParseError(f"{len(raw) - offset} trailing bytes", path=key, offset=offset)

        self.predictors[key] = p
        return p


# Global instance
checkpoint_manager = CheckpointManager()
