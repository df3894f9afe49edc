import os
import unittest


def suite(loader=None, pattern='test*.py'):
    """Discover the unit tests; the slower time_*.py scripts are run by hand."""
    test_dir = os.path.dirname(__file__)
    if loader is None:
        loader = unittest.TestLoader()
    return unittest.TestSuite([loader.discover(test_dir, pattern or 'test*.py')])


def load_tests(loader, tests, pattern):
    return suite(loader, pattern)


if __name__ == '__main__':
    unittest.main(defaultTest='suite')
