import os
import logging


def set(filename=None):

    root = logging.getLogger()

    if not root.handlers:
        filename = filename or os.getenv("DRIFTGAS_LOG_FILE", "logs.txt")

        logging.basicConfig(
            level=logging.INFO,
            format="%(asctime)s [%(levelname)s] %(message)s",
            handlers=[logging.FileHandler(filename), logging.StreamHandler()],
        )

    return root
