from tmkit.cli.command import BaseCommand, ExitStatus


class Command(BaseCommand):
    command = "help"
    description = "display general help about available commands"
    usage = "help [command]"

    def run(self, args: list, command_list: dict) -> int:
        # if command help, display it
        if len(args) > 0:
            cmd = args[0]
            if cmd in command_list.keys():
                command_list[cmd].help()
                return ExitStatus.SUCCESS
            self._tty.error("Error : invalid command '{}'".format(cmd))
            return ExitStatus.INPUT_ERROR

        # list all commands
        self._tty.write("Available commands:")
        self._tty.write("=" * 19)
        for name in sorted(command_list.keys()):
            self._tty.write("{}\t{}".format(name, command_list[name].description))
        return ExitStatus.SUCCESS
