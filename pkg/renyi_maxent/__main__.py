"""Entry point for ``python -m renyi_maxent``."""

from .commands import main


if __name__ == '__main__':
    main()
