import datetime
import functools
import logging
from datetime import timedelta
from timeit import default_timer as timer

from util.conf import DISC_SETTINGS

LOG_FORMAT = "[%(asctime)s.%(msecs)03d] [%(levelname)s] %(name)s : %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class Logger(logging.Logger):

    def __init__(self, name, level=logging.NOTSET):
        super().__init__(name=name, level=level)

    def verbose_info(self, msg, *args, **kwargs):
        if DISC_SETTINGS.verbose:
            if self.isEnabledFor(logging.INFO):
                self._log(logging.INFO, msg, args, **kwargs)


def init_logger(name):
    """
    Create a toolkit logger writing to stderr, so command output on stdout stays machine readable.

    :param name: logger name, usually the module's ``__name__``.
    :return: configured Logger instance.
    """
    logger = Logger(name, level=logging.DEBUG if DISC_SETTINGS.verbose else logging.INFO)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
    logger.addHandler(handler)
    logger.propagate = False
    return logger


def print_timing(message, sep='-'):
    assert message is not None, "Message is not passed to print_timing decorator"
    timing_logger = init_logger('disc.timing')

    def deco_wrapper(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start = timer()
            timing_logger.verbose_info(sep * 20)
            timing_logger.verbose_info(f'{message} started {datetime.datetime.now().strftime("%H:%M:%S")}')
            result = func(*args, **kwargs)
            end = timer()
            timing_logger.verbose_info(f"{message} finished in {timedelta(seconds=end - start)}")
            timing_logger.verbose_info(sep * 20)
            return result

        return wrapper

    return deco_wrapper
