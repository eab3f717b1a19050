import sys

from cybundle.cli import run

if __name__ == "__main__":
    sys.exit(run())
