import os
import sys


class AnsiColor:
    """
    ANSI color decorator

    Example:
        color = AnsiColor()
        print(color.red('error message'))
    """

    fg_colors = {
        "red": 31,
        "yellow": 33,
    }

    def __getattr__(self, item):
        if item not in AnsiColor.fg_colors.keys():
            raise RuntimeError("Invalid color name '{}'".format(item))

        def _result(msg):
            return "\033[" + str(AnsiColor.fg_colors[item]) + "m" + msg + "\033[0m"

        return _result


class PlainColor:
    """
    Drop-in replacement for AnsiColor that leaves messages untouched
    """

    def __getattr__(self, item):
        if item not in AnsiColor.fg_colors.keys():
            raise RuntimeError("Invalid color name '{}'".format(item))

        def _result(msg):
            return msg

        return _result


def color_enabled(configured=None, stream=None) -> bool:
    """
    Resolve diagnostic coloring
    TMKIT_COLOR=0|1 wins over the configured value; without either, color is used only on a TTY
    :param configured: [output].color from the config file, or None
    :param stream: error stream
    :return: bool
    """
    env = os.getenv(ConsoleWriter.ENV_COLOR, None)
    if env is not None and env.strip() in ("0", "1"):
        return env.strip() == "1"
    if configured is not None:
        return bool(configured)
    stream = stream or sys.stderr
    isatty = getattr(stream, "isatty", None)
    return bool(isatty()) if isatty is not None else False


class ConsoleWriter:
    ENV_COLOR = "TMKIT_COLOR"

    def __init__(self, stdout=None, stderr=None, color: bool = False):
        """
        Constructor
        User-facing output goes to stdout; diagnostics and errors go to stderr
        :param stdout: output stream, defaults to sys.stdout
        :param stderr: error stream, defaults to sys.stderr
        :param color: if True, stderr messages are colored
        """
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.colorizer = AnsiColor() if color else PlainColor()

    def header(self, message, eol=True):
        self.write(message, eol)

    def write(self, message, eol=True):
        self.stdout.write(message)
        if eol:
            self.stdout.write("\n")

    def error(self, message, eol=True):
        self.write_error(self.colorizer.red(message), eol)

    def warn(self, message, eol=True):
        self.write_error(self.colorizer.yellow(message), eol)

    def write_error(self, message, eol=True):
        self.stderr.write(message)
        if eol:
            self.stderr.write("\n")
