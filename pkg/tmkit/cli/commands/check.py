from tmkit.cli.command import BaseCommand, ExitStatus, UsageError


class Command(BaseCommand):
    command = "check"
    description = "parse, lower and validate a model; prints diagnostics"
    usage = "check <model>"

    def run(self, args: list, command_list: dict) -> int:
        try:
            positional, _ = self.parse_args(args)
        except UsageError as e:
            self._tty.error("Error : {}".format(e))
            return ExitStatus.INPUT_ERROR

        if len(positional) != 1:
            self._tty.error("Error : missing model path; usage: {} {}".format(self._name, self.usage))
            return ExitStatus.INPUT_ERROR

        path = positional[0]
        if self.load_bundle(path) is None:
            return ExitStatus.INPUT_ERROR

        self._tty.write("{}: ok".format(path))
        return ExitStatus.SUCCESS
