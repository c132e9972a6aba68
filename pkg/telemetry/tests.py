import json
import threading

from django.test import SimpleTestCase

from pathwise.exceptions import PathwiseError
from telemetry.models import REPORT_SCHEMA_VERSION, STANDARD_COUNTERS, Counters, ReportFormat
from telemetry.services import parse_report, report, report_data


class CountersTest(SimpleTestCase):
    """Test suite for Counters"""

    def test_record(self):
        """Test counters accumulate"""
        counters = Counters()
        counters.record('labels_fw')
        counters.record('labels_fw', 4)
        self.assertEqual(counters['labels_fw'], 5)
        self.assertEqual(counters['never'], 0)

    def test_negative_delta(self):
        """Test counters never decrease"""
        with self.assertRaises(ValueError):
            Counters().record('labels_fw', -1)

    def test_disabled(self):
        """Test a disabled sink records nothing"""
        counters = Counters(enabled=False)
        counters.record('labels_fw', 3)
        with counters.time_phase('forward'):
            pass
        self.assertEqual(counters.counters, {})
        self.assertEqual(counters.timers, {})

    def test_time_phase(self):
        """Test phase timers accumulate"""
        counters = Counters()
        with counters.time_phase('join'):
            pass
        with counters.time_phase('join'):
            pass
        self.assertIn('join', counters.timers)
        self.assertGreaterEqual(counters.timers['join'], 0)

    def test_concurrent_records(self):
        """Test both direction workers can record at once"""
        counters = Counters()

        def work():
            for _ in range(1000):
                counters.record('join_attempts')

        threads = [threading.Thread(target=work) for _ in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        self.assertEqual(counters['join_attempts'], 4000)

    def test_snapshot_lists_standard_counters(self):
        """Test unrecorded standard counters appear as zero"""
        counters = Counters()
        counters.record('custom')
        snapshot = counters.snapshot()
        for name in STANDARD_COUNTERS:
            self.assertEqual(snapshot['counters'][name], 0)
        self.assertEqual(snapshot['counters']['custom'], 1)


class ReportTest(SimpleTestCase):
    """Test suite for telemetry reports"""

    def setUp(self):
        self.counters = Counters()
        self.counters.record('labels_fw', 12)
        self.counters.record('relaxation_iterations', 2)
        with self.counters.time_phase('forward'):
            pass

    def test_text(self):
        """Test the text report"""
        lines = report(self.counters).splitlines()
        self.assertIn('labels_fw 12', lines)
        self.assertIn('relaxation_iterations 2', lines)
        self.assertIn('evicted_bw 0', lines)
        self.assertTrue(any(line.startswith('time_forward ') for line in lines))
        names = [line.split()[0] for line in lines if not line.startswith('time_')]
        self.assertEqual(names, sorted(names))

    def test_text_without_timers(self):
        """Test timers can be left out"""
        text = report(self.counters, include_timers=False)
        self.assertNotIn('time_', text)

    def test_json(self):
        """Test the json report carries its schema version"""
        payload = json.loads(report(self.counters, ReportFormat.JSON))
        self.assertEqual(payload['schema_version'], REPORT_SCHEMA_VERSION)
        self.assertEqual(payload['counters']['labels_fw'], 12)
        self.assertIn('forward', payload['timers'])

    def test_parse_report(self):
        """Test a json report reads back"""
        data = parse_report(report(self.counters, 'json'))
        self.assertEqual(data['counters'], report_data(self.counters)['counters'])

    def test_parse_rejects_bad_reports(self):
        """Test malformed, invalid and future reports"""
        with self.assertRaises(PathwiseError):
            parse_report('{not json')
        with self.assertRaises(PathwiseError):
            parse_report('{"schema_version": 1, "counters": {"labels_fw": -1}}')
        with self.assertRaises(PathwiseError):
            parse_report('{"schema_version": 99, "counters": {}}')

    def test_parse_strict_json(self):
        """Test non standard constants are rejected and bytes are accepted"""
        with self.assertRaises(PathwiseError):
            parse_report('{"schema_version": NaN, "counters": {}}')
        data = parse_report(report(self.counters, 'json').encode())
        self.assertEqual(data['schema_version'], REPORT_SCHEMA_VERSION)
