from tmkit.cli.command import BaseCommand, ExitStatus, UsageError
from tmkit.io import ExportView, to_dot, to_json


class Command(BaseCommand):
    command = "export"
    description = "write a model as DOT (one view) or as a JSON bundle"
    usage = "export <model> [--view static|events|behavior] [--format dot|json]"

    FORMATS = ["dot", "json"]

    def run(self, args: list, command_list: dict) -> int:
        try:
            positional, flags = self.parse_args(args, ("--view", "--format"))
        except UsageError as e:
            self._tty.error("Error : {}".format(e))
            return ExitStatus.INPUT_ERROR

        if len(positional) != 1:
            self._tty.error("Error : missing model path; usage: {} {}".format(self._name, self.usage))
            return ExitStatus.INPUT_ERROR

        fmt = flags.get("--format", "dot")
        if fmt not in self.FORMATS:
            self._tty.error("Error : invalid format '{}'".format(fmt))
            return ExitStatus.INPUT_ERROR
        try:
            view = ExportView(flags.get("--view", ExportView.STATIC.value))
        except ValueError:
            self._tty.error("Error : invalid view '{}'".format(flags["--view"]))
            return ExitStatus.INPUT_ERROR

        bundle = self.load_bundle(positional[0])
        if bundle is None:
            return ExitStatus.INPUT_ERROR

        if fmt == "json":
            self._tty.write(to_json(bundle), False)
        else:
            self._tty.write(to_dot(bundle, view), False)
        return ExitStatus.SUCCESS
