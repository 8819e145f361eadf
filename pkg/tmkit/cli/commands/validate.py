from tmkit.cli.command import BaseCommand, ExitStatus, UsageError
from tmkit.constraints import evaluate
from tmkit.core import ModelError
from tmkit.dsl import parse_script_file
from tmkit.engine import Interpreter, Trace, TraceFormatError, from_text
from tmkit.io import DecodeError, from_json


class Command(BaseCommand):
    command = "validate"
    description = "check a trace (or the trace of a script run) against the model constraints"
    usage = "validate <model> <trace.txt|trace.json|script.tms>"

    def _trace(self, bundle, path: str):
        """
        Obtain the trace to check
        :return: (Trace or None, ExitStatus)
        """
        if path.endswith(".tms"):
            parsed = parse_script_file(path)
            self.report_diagnostics(parsed.diagnostics, path)
            if not parsed.success:
                return None, ExitStatus.INPUT_ERROR
            result = Interpreter(bundle, self.max_firings).run(parsed.value)
            if not result.success:
                self._tty.error("Error : {}: statement {}: {}".format(path, result.failed_at + 1, result.error))
                return None, ExitStatus.RUNTIME_ERROR
            return result.trace, ExitStatus.SUCCESS

        with open(path, "r", encoding="utf-8") as f:
            content = f.read()
        if path.endswith(".json"):
            trace = from_json(content)
            if not isinstance(trace, Trace):
                self._tty.error("Error : '{}' is not a trace document".format(path))
                return None, ExitStatus.INPUT_ERROR
            return trace, ExitStatus.SUCCESS
        return from_text(content), ExitStatus.SUCCESS

    def run(self, args: list, command_list: dict) -> int:
        try:
            positional, _ = self.parse_args(args)
        except UsageError as e:
            self._tty.error("Error : {}".format(e))
            return ExitStatus.INPUT_ERROR

        if len(positional) != 2:
            self._tty.error("Error : expected a model and a trace; usage: {} {}".format(self._name, self.usage))
            return ExitStatus.INPUT_ERROR

        model_path, trace_path = positional
        bundle = self.load_bundle(model_path)
        if bundle is None:
            return ExitStatus.INPUT_ERROR

        try:
            trace, status = self._trace(bundle, trace_path)
        except (OSError, DecodeError, TraceFormatError) as e:
            self._tty.error("Error : {}".format(e))
            return ExitStatus.INPUT_ERROR
        if trace is None:
            return status

        try:
            report = evaluate(bundle, trace)
        except ModelError as e:
            self._tty.error("Error : {}".format(e))
            return ExitStatus.INPUT_ERROR

        self._tty.write(report.to_text(), False)
        if report.conforming:
            return ExitStatus.SUCCESS
        return ExitStatus.VIOLATIONS
