"""Exception types shared across the mining pipeline."""


class ApiswapError(Exception):
    """Base class for all pipeline errors."""


class LibraryNotFound(ApiswapError):
    """No usable release of a library exists in the remote repository."""

    def __init__(self, coordinate, detail=""):
        self.coordinate = coordinate
        msg = f"no resolvable release for {coordinate}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NetworkError(ApiswapError):
    """The artifact repository could not be reached."""


class MetadataParseError(ApiswapError):
    """Version metadata was retrieved but could not be interpreted."""


class ArchiveCorrupt(ApiswapError):
    """A downloaded source archive could not be unpacked."""


class GitUnavailable(ApiswapError):
    """No usable git binary was found on PATH."""


class RepoUnavailable(ApiswapError):
    """A client repository could not be cloned or read."""


class UnknownBranch(ApiswapError):
    """The requested branch does not exist in the repository."""


class MissingCommit(ApiswapError):
    """A commit id was requested that the repository does not contain."""


class GitError(ApiswapError):
    """A git invocation failed in a way we cannot recover from."""

    def __init__(self, argv, returncode, stderr):
        self.argv = list(argv)
        self.returncode = returncode
        self.stderr = stderr
        super().__init__(
            f"git {' '.join(argv)} exited {returncode}: {stderr.strip()[:300]}"
        )


class UnknownPairError(ApiswapError):
    """A condition trace was requested for a pair the detector never saw."""


class UnresolvedLabel(ApiswapError):
    """A label row references a candidate that is not in the given set."""

    def __init__(self, row):
        self.row = row
        super().__init__(f"label row does not match any candidate: {row!r}")


class SchemaError(ApiswapError):
    """An input file does not have the expected columns or field values."""


class ConfigError(ApiswapError):
    """The pipeline configuration is malformed or self-contradictory."""
