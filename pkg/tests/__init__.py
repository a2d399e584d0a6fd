from pathlib import Path


class TestData:
    __test__ = False

    def __init__(self, path: str) -> None:
        self.directory = Path(path).resolve().parent

    def get_path(self, rel_path: str) -> str:
        return str(self.directory / rel_path)


test_data = TestData(__file__)
