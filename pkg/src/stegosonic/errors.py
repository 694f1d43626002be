"""Exception hierarchy shared by every stegosonic module."""


class StegoError(Exception):
    """Base class for all domain errors; the CLI maps these to exit code 2."""


# container parsing
class MalformedRiff(StegoError):
    pass


class UnsupportedFormat(StegoError):
    pass


class NoFramesFound(StegoError):
    pass


class CorruptFrame(StegoError):
    pass


# payload envelope
class EmptyPassword(StegoError):
    pass


class MalformedPayload(StegoError):
    pass


class AuthenticationFailed(StegoError):
    pass


class DecompressionFailed(StegoError):
    pass


# embedding
class PayloadTooLarge(StegoError):
    def __init__(self, size, capacity, what="payload"):
        self.size = size
        self.capacity = capacity
        super().__init__(
            f"{what} of {size} bytes exceeds the carrier capacity of {capacity} bytes"
        )


class NoHiddenData(StegoError):
    pass


class NotTextPayload(StegoError):
    pass


class TooFewFrames(StegoError):
    pass


# analysis
class FormatMismatch(StegoError):
    pass


# transfer
class TransferError(StegoError):
    pass


class OfferRejected(TransferError):
    pass


class ChecksumMismatch(TransferError):
    pass


class TransferTimeout(TransferError):
    pass


class PortInUse(TransferError):
    pass


class DiskFull(TransferError):
    pass


class ProtocolError(TransferError):
    pass


class ConnectionRefused(TransferError):
    pass
