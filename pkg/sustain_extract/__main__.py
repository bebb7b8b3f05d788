"""Entry point for `python -m sustain_extract`."""

from sustain_extract.cli import main


if __name__ == "__main__":
    main()
