def _build(exception_type, message, payload):
    if payload is None:
        return exception_type(message)
    return exception_type(message, payload)


def raise_with_logging_error(message, logger, exception_type, exp=None, payload=None):
    """
    Log an error message and raise an exception.

    The message is logged at error level before raising the specified
    exception type. If an originating exception is provided, it is
    attached as the cause.

    :param message:
        Error message to log and attach to the raised exception.
    :type message: str
    :param logger:
        Logger instance used to emit the message.
    :type logger: logging.Logger
    :param exception_type:
        Exception class to raise.
    :type exception_type: type[Exception]
    :param exp:
        Optional original exception to be chained.
    :type exp: Exception or None
    :param payload:
        Optional diagnostic data handed to :class:`opdef.utils.exceptions.OpdefError`
        subclasses as their second argument.
    :type payload: Any
    :raises Exception:
        Always raises the specified exception type.
    """

    logger.error(message)
    if exp is not None:
        raise _build(exception_type, message, payload) from exp
    else:
        raise _build(exception_type, message, payload)


def raise_with_logging_warning(message, logger, exception_type, payload=None):
    """
    Log a warning message and raise an exception.

    Used for failures that callers are expected to recover from, e.g. a
    compactness ladder that did not decay inside ``classify``.

    :param message:
        Warning message to log and attach to the raised exception.
    :type message: str
    :param logger:
        Logger instance used to emit the message.
    :type logger: logging.Logger
    :param exception_type:
        Exception class to raise.
    :type exception_type: type[Exception]
    :param payload:
        Optional diagnostic data attached to the exception.
    :type payload: Any
    :raises Exception:
        Always raises the specified exception type.
    """

    logger.warning(message)
    raise _build(exception_type, message, payload)


def raise_with_logging_debug(message, logger, exception_type, payload=None):
    """
    Log a debug message and raise an exception.

    :param message:
        Debug message to log and attach to the raised exception.
    :type message: str
    :param logger:
        Logger instance used to emit the message.
    :type logger: logging.Logger
    :param exception_type:
        Exception class to raise.
    :type exception_type: type[Exception]
    :param payload:
        Optional diagnostic data attached to the exception.
    :type payload: Any
    :raises Exception:
        Always raises the specified exception type.
    """

    logger.debug(message)
    raise _build(exception_type, message, payload)
