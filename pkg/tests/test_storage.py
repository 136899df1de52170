import logging
import xml.etree.ElementTree as ElementTree

import orjson
import pytest

from core.exceptions import DataParseError
from models.series import LabelSequence, SampleSeries
from services.envelopes import build_envelopes
from services.forks import hierarchical_fork
from services.splitter import trimmed_split
from storage.plot import SVG_NAMESPACE, emit_plot
from storage.results import emit_bands, emit_split, read_split
from storage.series import emit_series, ingest


def write(tmp_path, name: str, content: str):
    path = tmp_path / name
    path.write_text(content)
    return path


def polylines(path) -> list[ElementTree.Element]:
    return list(ElementTree.parse(path).getroot().iter(f'{{{SVG_NAMESPACE}}}polyline'))


def test_ingest_single_column(tmp_path):
    series = ingest(write(tmp_path, 'series.csv', '0\n2\n1\n'))
    assert series.values == (0.0, 2.0, 1.0)
    assert series.timestamps is None
    assert series.grid.tolist() == [1.0, 2.0, 3.0]


def test_ingest_with_header(tmp_path):
    series = ingest(write(tmp_path, 'series.csv', 't,value\n10,0\n20,2\n30,1\n'))
    assert series.values == (0.0, 2.0, 1.0)
    assert series.timestamps == (10.0, 20.0, 30.0)


def test_ingest_two_columns_without_header(tmp_path):
    series = ingest(write(tmp_path, 'series.csv', '1,5\n2,6\n4,7\n'))
    assert series.values == (5.0, 6.0, 7.0)
    assert series.timestamps == (1.0, 2.0, 4.0)


def test_ingest_ignores_extra_columns_with_header(tmp_path):
    series = ingest(write(tmp_path, 'series.csv', 'id,t,value,note\na,1,5,first\nb,2,3,second\n'))
    assert series.values == (5.0, 3.0)
    assert series.timestamps == (1.0, 2.0)


@pytest.mark.parametrize('content, line', [
    ('a,b\nx,y\n', 2),
    ('t,value\n1,0\n1,2\n', 3),
    ('t,value\n1,0\n2,nan\n', 3),
    ('', 1),
    ('t,value\n', 1),
    ('1,2,3\n', 1),
])
def test_ingest_reports_line(tmp_path, content, line):
    with pytest.raises(DataParseError) as error:
        ingest(write(tmp_path, 'series.csv', content))
    assert error.value.line == line
    assert error.value.path.endswith('series.csv')


@pytest.mark.parametrize('content, line', [
    (b't,value\n1,0\n2,\xff\xfe\n', 3),
    (b'\xc3\n1\n', 1),
    (b't,value\n1,0\n2,' + b'9' * 200_000 + b'\n', 3),
])
def test_ingest_reports_undecodable_or_malformed_csv(tmp_path, content, line):
    path = tmp_path / 'series.csv'
    path.write_bytes(content)
    with pytest.raises(DataParseError) as error:
        ingest(path)
    assert error.value.line == line


def test_read_split_reports_undecodable_bytes(tmp_path):
    path = tmp_path / 'split.csv'
    path.write_bytes(b't,x,label\n1,\xff,1\n')
    with pytest.raises(DataParseError) as error:
        read_split(path)
    assert error.value.line == 2


def test_ingest_json_numbers(tmp_path):
    series = ingest(write(tmp_path, 'series.json', '[0, 2, 1]'))
    assert series.values == (0.0, 2.0, 1.0)
    assert series.timestamps is None


def test_ingest_json_objects(tmp_path):
    series = ingest(write(tmp_path, 'series.json', '[{"t": 10, "value": 0}, {"t": 20, "value": 2.5}]'))
    assert series.values == (0.0, 2.5)
    assert series.timestamps == (10.0, 20.0)


def test_format_flag_overrides_extension(tmp_path):
    series = ingest(write(tmp_path, 'series.txt', '[1, 2]'), 'json')
    assert series.values == (1.0, 2.0)


@pytest.mark.parametrize('content', [
    '[0, 2',
    '{"value": 1}',
    '[true, 1]',
    '[]',
    '[{"t": 2, "value": 1}, {"t": 1, "value": 2}]',
])
def test_ingest_json_errors(tmp_path, content):
    with pytest.raises(DataParseError):
        ingest(write(tmp_path, 'series.json', content))


def test_emit_split_worked_example(tmp_path, worked_series, capsys):
    result = trimmed_split(worked_series)
    pair = build_envelopes(worked_series, result.labels, 'linear')
    path = tmp_path / 'split.csv'
    emit_split(result, pair, path)

    assert path.read_text().splitlines() == [
        't,x,label,upper,lower,upper_defined,lower_defined',
        '1,0,1,2,0,0,1',
        '2,2,0,2,0.5,1,0',
        '3,1,1,2,1,0,1',
    ]
    assert capsys.readouterr().out == 'total_drift=1 final_survivors=2\n'


def test_emit_split_single_sample(tmp_path, capsys, caplog):
    series = SampleSeries.from_values([5])
    result = trimmed_split(series)
    path = tmp_path / 'split.csv'
    with caplog.at_level(logging.WARNING):
        emit_split(result, build_envelopes(series, result.labels), path)

    assert path.read_text().splitlines()[1:] == ['1,5,1,5,,1,']
    assert 'total_drift=0' in capsys.readouterr().out
    assert 'Lower envelope is absent' in caplog.text


def test_split_round_trip(tmp_path, lattice_walk):
    series = lattice_walk(60)
    result = trimmed_split(series)
    path = tmp_path / 'split.csv'
    emit_split(result, build_envelopes(series, result.labels), path)

    restored, labels = read_split(path)
    assert restored.values == series.values
    assert labels == result.labels
    assert ingest(path).values == series.values


def test_read_split_needs_columns(tmp_path):
    with pytest.raises(DataParseError):
        read_split(write(tmp_path, 'split.csv', 't,value\n1,2\n'))


def test_series_export_round_trip(tmp_path, uniform_series):
    series = SampleSeries.from_values(uniform_series(25).values, timestamps=range(0, 50, 2))
    for name in ('series.csv', 'series.json'):
        emit_series(series, tmp_path / name)
        assert ingest(tmp_path / name) == series


def test_series_json_layout(tmp_path):
    emit_series(SampleSeries.from_values([0.5, 1]), tmp_path / 'series.json')
    assert orjson.loads((tmp_path / 'series.json').read_bytes()) == [{'t': 1.0, 'value': 0.5}, {'t': 2.0, 'value': 1.0}]


def test_emit_bands(tmp_path, worked_series):
    tree = hierarchical_fork(worked_series, 2, 'linear')
    path = tmp_path / 'bands.csv'
    emit_bands(tree, path)
    assert path.read_text().splitlines() == [
        'path,t,upper,lower,upper_defined,lower_defined',
        'root,1,2,0,0,1',
        'root,2,2,0.5,1,0',
        'root,3,2,1,0,1',
        'lower,1,1,0,0,1',
        'lower,3,1,0,1,0',
    ]


def test_plot_of_envelope_pair(tmp_path, worked_series):
    result = trimmed_split(worked_series)
    path = tmp_path / 'plot.svg'
    emit_plot(worked_series, build_envelopes(worked_series, result.labels), path)
    lines = polylines(path)
    assert len(lines) == 3
    assert [line.get('class') for line in lines] == ['series', 'upper level-1', 'lower level-1']
    assert len(lines[0].get('points').split()) == 3


def test_plot_without_lower_envelope(tmp_path, worked_series):
    pair = build_envelopes(worked_series, LabelSequence(labels=(1, 1, 1)))
    path = tmp_path / 'plot.svg'
    emit_plot(worked_series, pair, path)
    assert len(polylines(path)) == 2


def test_plot_of_fork_tree(tmp_path, uniform_series):
    series = uniform_series(80)
    tree = hierarchical_fork(series, 2)
    path = tmp_path / 'plot.svg'
    emit_plot(series, tree, path)
    lines = polylines(path)
    assert len(lines) == 1 + 2 * len(tree.split_nodes())
    nested = sum(node.level == 1 for node in tree.split_nodes())
    assert sum('level-2' in line.get('class') for line in lines) == 2 * nested


def test_plot_is_deterministic(tmp_path, uniform_series):
    series = uniform_series(100)
    pair = build_envelopes(series, trimmed_split(series).labels)
    emit_plot(series, pair, tmp_path / 'first.svg')
    emit_plot(series, pair, tmp_path / 'second.svg')
    assert (tmp_path / 'first.svg').read_bytes() == (tmp_path / 'second.svg').read_bytes()


def test_plot_points_stay_inside_margins(tmp_path, uniform_series):
    series = uniform_series(50)
    path = tmp_path / 'plot.svg'
    emit_plot(series, build_envelopes(series, trimmed_split(series).labels), path)
    root = ElementTree.parse(path).getroot()
    width, height = float(root.get('width')), float(root.get('height'))
    for line in polylines(path):
        for point in line.get('points').split():
            x, y = map(float, point.split(','))
            assert 0.05 * width - 1e-3 <= x <= 0.95 * width + 1e-3
            assert 0.05 * height - 1e-3 <= y <= 0.95 * height + 1e-3
