from __future__ import annotations

import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import typer

from qlocal.core.bloch import Prior
from qlocal.errors import CapExceededError, UsageError
from qlocal.utils import runtime
from qlocal.utils.io import append_csv, dumps_json, read_csv
from qlocal.utils.options import RunConfig, fail, parse_copies, parse_format, parse_trials, resolve_seed


class TestParsing(unittest.TestCase):
    def test_copies(self) -> None:
        self.assertEqual(parse_copies("1..10"), list(range(1, 11)))
        self.assertEqual(parse_copies("40..100:20"), [40, 60, 80, 100])
        self.assertEqual(parse_copies("9, 3,6,3"), [3, 6, 9])
        for raw in ("", "5..1", "1..4:0", "a..b", "0..3"):
            with self.subTest(raw=raw):
                with self.assertRaises(UsageError):
                    parse_copies(raw)

    def test_trials(self) -> None:
        self.assertEqual(parse_trials("1e6"), 1_000_000)
        self.assertEqual(parse_trials(250), 250)
        for raw in ("0", "2.5", "lots", "inf"):
            with self.subTest(raw=raw):
                with self.assertRaises(UsageError):
                    parse_trials(raw)

    def test_format(self) -> None:
        self.assertEqual(parse_format(" CSV "), "csv")
        with self.assertRaises(UsageError):
            parse_format("xml")


class TestRunConfig(unittest.TestCase):
    def test_to_dict(self) -> None:
        config = RunConfig("simulate", (4, 8), Prior.CIRCLE_2D, trials=100, seed=7, output=Path("out.csv"), output_format="csv")
        payload = config.to_dict()
        self.assertEqual(payload["N"], [4, 8])
        self.assertEqual(payload["prior"], "2d")
        self.assertEqual(payload["output"], "out.csv")
        self.assertEqual(payload["runtime"], runtime.runtime_metadata())

    def test_rejects_bad_values(self) -> None:
        with self.assertRaises(UsageError):
            RunConfig("eval", threads=0)
        with self.assertRaises(UsageError):
            RunConfig("eval", output_format="xml")


class TestFailureCodes(unittest.TestCase):
    def exit_code(self, exc: BaseException) -> int:
        with patch.object(typer, "echo"):
            with self.assertRaises(typer.Exit) as ctx:
                fail(exc)
        return ctx.exception.exit_code

    def test_mapping(self) -> None:
        self.assertEqual(self.exit_code(CapExceededError("too deep", limit=8, requested=9)), 3)
        self.assertEqual(self.exit_code(UsageError("bad")), 2)
        self.assertEqual(self.exit_code(FileNotFoundError("missing")), 2)
        self.assertEqual(self.exit_code(RuntimeError("boom")), 1)

    def test_seed_passthrough(self) -> None:
        self.assertEqual(resolve_seed(12), 12)
        with self.assertRaises(UsageError):
            resolve_seed(-1)


class TestIo(unittest.TestCase):
    def test_append_writes_header_once(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "nested" / "rows.csv"
            append_csv([{"a": 1, "b": 2}], ["a", "b"], path)
            append_csv([{"a": 3, "b": 4, "c": 5}], ["a", "b"], path)
            self.assertEqual(path.read_text(encoding="utf-8").splitlines(), ["a,b", "1,2", "3,4"])
            self.assertEqual(read_csv(path)[1], {"a": "3", "b": "4"})

    def test_dumps_json_ends_with_newline(self) -> None:
        self.assertEqual(dumps_json({"F": 0.5}), '{\n  "F": 0.5\n}\n')


class TestRuntime(unittest.TestCase):
    def test_resolve_threads(self) -> None:
        self.assertEqual(runtime.resolve_threads(3), 3)
        self.assertGreaterEqual(runtime.resolve_threads(None), 1)
        with self.assertRaises(ValueError):
            runtime.resolve_threads(0)

    def test_map_ordered_keeps_input_order(self) -> None:
        def work(item: int) -> int:
            return item * item

        self.assertEqual(runtime.map_ordered(work, range(20), threads=4), [i * i for i in range(20)])
        self.assertEqual(runtime.map_ordered(work, [], threads=4), [])

    def test_thread_count_without_psutil(self) -> None:
        with patch.object(runtime, "_get_psutil", return_value=None):
            with patch.object(runtime.os, "cpu_count", return_value=None):
                self.assertEqual(runtime.default_thread_count(), 1)

    def test_metadata(self) -> None:
        self.assertEqual(set(runtime.runtime_metadata()), {"qlocal_version", "python_version"})


if __name__ == "__main__":
    unittest.main()
