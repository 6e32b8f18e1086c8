import csv
import io
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from src.core.kinds import ScalarKind
from src.core.lattice.entities import BlockShape, FieldSample
from src.core.lattice.exceptions import FieldFormatError, FieldReadError

logger = logging.getLogger(__name__)


class FieldSampleManager:
    """
    FieldSample CSV storage.

    Line 1 is the header `m,d,N_1,...,N_d,kind`; then one row per lattice point
    in canonical order with m values, or m (re, im) pairs for complex fields.
    """

    def save(self, sample: FieldSample, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        flat = sample.flat()
        with path.open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(
                [sample.channels, sample.d, *sample.shape.extents, sample.scalar_kind]
            )
            for row in flat:
                if sample.is_complex:
                    writer.writerow(
                        [repr(float(part)) for z in row for part in (z.real, z.imag)]
                    )
                else:
                    writer.writerow([repr(float(x)) for x in row])
        logger.info("wrote field %s to %s", sample.shape.extents, path)
        return path

    def load(self, path: str | Path) -> FieldSample:
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as e:
            raise FieldReadError(str(path), e.strerror or str(e))
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FieldFormatError(raw.count(b"\n", 0, e.start) + 1, "not valid UTF-8")
        rows = list(csv.reader(io.StringIO(text, newline="")))
        if not rows:
            raise FieldFormatError(1, "file is empty")

        m, extents, kind = self._parse_header(rows[0])
        width = 2 * m if kind == ScalarKind.COMPLEX else m
        count = int(np.prod(extents))
        body = rows[1:]
        if len(body) != count:
            raise FieldFormatError(
                len(rows) + 1 if len(body) < count else count + 2,
                f"expected {count} data rows, found {len(body)}",
            )

        data = np.empty((count, width), dtype=np.float64)
        for index, row in enumerate(body):
            line = index + 2
            if len(row) != width:
                raise FieldFormatError(line, f"expected {width} columns, found {len(row)}")
            try:
                data[index] = [float(value) for value in row]
            except ValueError:
                raise FieldFormatError(line, f"non-numeric entry in {row}")

        if kind == ScalarKind.COMPLEX:
            values = np.empty((count, m), dtype=np.complex128)
            values.real = data[:, 0::2]
            values.imag = data[:, 1::2]
        else:
            values = data
        return FieldSample(
            shape=BlockShape(extents=extents),
            channels=m,
            scalar_kind=kind,
            data=values.reshape(extents + (m,)),
        )

    @staticmethod
    def _parse_header(header: list[str]) -> tuple[int, tuple[int, ...], ScalarKind]:
        try:
            m, d = int(header[0]), int(header[1])
            extents = tuple(int(value) for value in header[2 : 2 + d])
            kind = ScalarKind(header[2 + d])
        except (IndexError, ValueError):
            raise FieldFormatError(1, f"header must read m,d,N_1..N_d,kind; got {header}")
        if len(header) != d + 3:
            raise FieldFormatError(1, f"header has {len(header)} fields, expected {d + 3}")
        try:
            BlockShape(extents=extents)
        except ValidationError:
            raise FieldFormatError(1, f"invalid block extents {extents}")
        if m < 1 or d < 1:
            raise FieldFormatError(1, "m and d must be >= 1")
        return m, extents, kind


field_sample_manager = FieldSampleManager()
