import os
import unittest
from unittest import mock

from coregular import config


class ConfigTests(unittest.TestCase):
    def test_defaults(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(config.get_element_cap(), config.DEFAULT_ELEMENT_CAP)
            self.assertEqual(config.get_degree_cap(), config.DEFAULT_DEGREE_CAP)
            self.assertEqual(config.get_workers(), 1)
            self.assertEqual(config.get_default_output(), "text")

    def test_environment_overrides(self):
        env = {
            "COREGULAR_ELEMENT_CAP": " 500 ",
            "COREGULAR_DEGREE_CAP": "8",
            "COREGULAR_WORKERS": "4",
            "COREGULAR_OUTPUT": "JSON",
        }
        with mock.patch.dict(os.environ, env, clear=True):
            self.assertEqual(config.get_element_cap(), 500)
            self.assertEqual(config.get_degree_cap(), 8)
            self.assertEqual(config.get_workers(), 4)
            self.assertEqual(config.get_default_output(), "json")

    def test_bad_values_fall_back(self):
        env = {"COREGULAR_ELEMENT_CAP": "lots", "COREGULAR_WORKERS": "-2", "COREGULAR_OUTPUT": "xml"}
        with mock.patch.dict(os.environ, env, clear=True):
            self.assertEqual(config.get_element_cap(), config.DEFAULT_ELEMENT_CAP)
            self.assertEqual(config.get_workers(), config.DEFAULT_WORKERS)
            self.assertEqual(config.get_default_output(), "text")

    def test_fixtures_dir(self):
        self.assertTrue(os.path.isfile(os.path.join(config.fixtures_dir(), "worked_example.json")))


if __name__ == "__main__":
    unittest.main()
