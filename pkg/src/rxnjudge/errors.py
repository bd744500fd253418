"""Exception types shared across the pipeline."""


class RxnJudgeError(Exception):
    """Base class for all errors raised by this package."""


class MalformedReaction(RxnJudgeError, ValueError):
    pass


class UnbalancedBrackets(RxnJudgeError, ValueError):
    pass


class EmptyCorpus(RxnJudgeError, ValueError):
    pass


class CandidateAbsent(RxnJudgeError, ValueError):
    pass


class LengthMismatch(RxnJudgeError, ValueError):
    pass


class ShapeMismatch(RxnJudgeError, ValueError):
    pass


class NonFiniteGradient(RxnJudgeError, FloatingPointError):
    pass


class DivergedTraining(RxnJudgeError, FloatingPointError):
    pass


class TooFewRecords(RxnJudgeError, ValueError):
    pass


class EmptyEvaluation(RxnJudgeError, ValueError):
    pass


class SingleClassEvaluation(RxnJudgeError, ValueError):
    pass


class ConfigError(RxnJudgeError, ValueError):
    pass


class CheckpointError(RxnJudgeError, ValueError):
    pass
