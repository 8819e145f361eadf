from tmkit.cli.command import BaseCommand, ExitStatus, UsageError
from tmkit.dsl import parse_script_file
from tmkit.engine import Interpreter, to_text
from tmkit.io import to_json


class Command(BaseCommand):
    command = "run"
    description = "execute a script against a model; prints the emitted messages"
    usage = "run <model> <script> [--trace <file>] [--json]"

    def run(self, args: list, command_list: dict) -> int:
        try:
            positional, flags = self.parse_args(args, ("--trace",), ("--json",))
        except UsageError as e:
            self._tty.error("Error : {}".format(e))
            return ExitStatus.INPUT_ERROR

        if len(positional) != 2:
            self._tty.error("Error : expected a model and a script; usage: {} {}".format(self._name, self.usage))
            return ExitStatus.INPUT_ERROR

        model_path, script_path = positional
        bundle = self.load_bundle(model_path)
        if bundle is None:
            return ExitStatus.INPUT_ERROR

        try:
            parsed = parse_script_file(script_path)
        except OSError as e:
            self._tty.error("Error : {}".format(e))
            return ExitStatus.INPUT_ERROR
        self.report_diagnostics(parsed.diagnostics, script_path)
        if not parsed.success:
            return ExitStatus.INPUT_ERROR

        result = Interpreter(bundle, self.max_firings).run(parsed.value)
        for message in result.trace.messages:
            self._tty.write(message.text)

        if "--trace" in flags:
            content = to_json(result.trace) if flags.get("--json", False) else to_text(result.trace)
            try:
                with open(flags["--trace"], "w", encoding="utf-8") as f:
                    f.write(content)
            except OSError as e:
                self._tty.error("Error : {}".format(e))
                return ExitStatus.INPUT_ERROR

        if not result.success:
            stmt = parsed.value.statements[result.failed_at]
            self._tty.error(
                "Error : {}:{}: {}".format(script_path, getattr(stmt, "line", None) or result.failed_at + 1, result.error)
            )
            return ExitStatus.RUNTIME_ERROR
        return ExitStatus.SUCCESS
