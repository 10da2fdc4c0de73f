'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=too-many-arguments
from argparse import ArgumentParser
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, fields
import json
import logging
import math
import os.path
import sys

import numpy as np
import pandas as pd

from liv_vein import clustering, extraction, gpo, imagecore, preprocess
from liv_vein.config import ALGORITHMS, PipelineConfig, load_config
from liv_vein.evalkit import bench, metrics, reference, synth


_LOGGER = logging.getLogger(__name__)

_IMAGE_EXTS = ('.pgm', '.png')


def cmd_preprocess(in_path, out_path, config, dump_stages=False):
    '''Writes the adjusted image, and optionally every stage.'''
    prepared = preprocess.prepare(imagecore.load_image(in_path), config)
    imagecore.save_image(prepared.adjusted, out_path)

    if dump_stages:
        stem = _stem(out_path)
        stages = {'normalized': prepared.normalized,
                  'denoised': prepared.denoised,
                  'adjusted': prepared.adjusted,
                  'quantized': prepared.quantized.image}

        for name, img in stages.items():
            imagecore.save_image(img, '%s_%s.pgm' % (stem, name))


def cmd_cluster(in_path, out_path, config):
    '''Writes cluster labels, the cluster table and the localized mask.'''
    prepared = preprocess.prepare(imagecore.load_image(in_path), config)
    quantized = prepared.quantized
    k = min(config.k or quantized.k, len(quantized.levels_present()))
    model = clustering.run_clusterer(config.algo, quantized.image, k,
                                     seed=config.seed,
                                     max_iter=config.max_iter,
                                     m=config.fcm_m, eps=config.fcm_eps)
    stem = _stem(out_path)

    imagecore.save_labels(model.labels, model.k, out_path)
    clustering.cluster_table(model).to_csv(stem + '.csv', index=False)
    imagecore.save_mask(clustering.localize(quantized.image, model),
                        stem + '_loc.pgm')


def cmd_extract(in_path, out_path, config, debug=False):
    '''Writes the extracted vein mask.'''
    stages = extraction.extract_stages(imagecore.load_image(in_path), config)
    imagecore.save_mask(stages.mask, out_path)

    if debug:
        stem = _stem(out_path)
        scores = stages.curvature.scores
        peak = scores.max()

        imagecore.save_image(stages.filtered, stem + '_filtered.pgm')
        imagecore.save_image(scores / peak if peak > 0 else scores,
                             stem + '_scores.pgm')
        imagecore.save_mask(stages.area, stem + '_preclose.pgm')
        imagecore.save_mask(stages.roi, stem + '_roi.pgm')

        freq = gpo.estimate_frequency(stages.filtered, stages.field,
                                      config.block_size, config.freq_window)
        gpo.field_table(stages.field, freq).to_csv(stem + '_field.csv',
                                                   index=False)


def cmd_eval(pred_path, truth_path, out_path, quality=None):
    '''Writes the mask metric report as JSON and CSV.'''
    counts = metrics.confusion(imagecore.load_mask(pred_path),
                               imagecore.load_mask(truth_path))
    report = metrics.metrics(counts)
    row = dict(asdict(counts), **report.to_dict())
    result = {'confusion': asdict(counts),
              'metrics': report.to_dict(),
              'reference': reference.localization_reference('optimized')}

    if quality:
        qual = metrics.quality(imagecore.load_image(quality[0]),
                               imagecore.load_image(quality[1]))
        result['quality'] = _quality_dict(qual)
        row.update({'mse': qual.mse, 'psnr': qual.psnr, 'snr': qual.snr})

    _write_report(result, pd.DataFrame([row]), out_path)


def cmd_bench(in_path, out_path, config):
    '''Writes clustering timings of every algorithm.'''
    img = imagecore.load_image(in_path)
    k = config.k or preprocess.AdjustSpec(l_out=config.l_out,
                                          h_out=config.h_out,
                                          step=config.step).levels().size
    report = bench.bench_clustering(img, k, reps=config.reps,
                                    seed=config.seed,
                                    max_iter=config.max_iter,
                                    m=config.fcm_m, eps=config.fcm_eps)
    _write_report(report.to_dict(), report.table(), out_path)


def cmd_compare(in_path, truth_path, out_path, config):
    '''Writes localization scores of every clustering algorithm.'''
    img = imagecore.load_image(in_path)
    truth = imagecore.load_mask(truth_path)
    k = config.k or 5
    reports = bench.compare_localization(img, truth, k, seed=config.seed,
                                         max_iter=config.max_iter,
                                         m=config.fcm_m, eps=config.fcm_eps)
    result = {algo: {'metrics': rep.to_dict(),
                     'reference': reference.localization_reference(algo)}
              for algo, rep in reports.items()}
    _write_report(result, metrics.report_table(reports), out_path)


def cmd_synth(spec, out_stem):
    '''Writes a phantom image and its truth mask.'''
    img, truth = synth.gen_phantom(spec)
    imagecore.save_image(img, out_stem + '.pgm')
    imagecore.save_mask(truth, out_stem + '_truth.pgm')


def main(argv=None):
    '''Runs a subcommand, returning the exit status.'''
    args = _get_parser().parse_args(argv)

    logging.basicConfig(format='%(asctime)s | %(levelname)s | %(message)s',
                        level=logging.DEBUG if args.verbose else
                        logging.INFO)

    if not args.command:
        _LOGGER.error('No command given')
        return 1

    try:
        return _run(args)
    except (OSError, ValueError) as err:
        _LOGGER.error('%s', err)
        return 1


def _run(args):
    '''Dispatches a parsed command line.'''
    if args.command == 'synth':
        spec = synth.PhantomSpec(
            seed=args.seed, width=args.width, height=args.height,
            vein_count=args.vein_count,
            vein_width_range=(args.vein_width_min, args.vein_width_max),
            background_level=args.background, vein_depth=args.depth,
            noise_sigma=args.noise, blur_sigma=args.blur)
        cmd_synth(spec, args.out)
        return 0

    if args.command == 'eval':
        cmd_eval(args.pred, args.truth, args.out, args.quality)
        return 0

    overrides = {fld.name: getattr(args, fld.name)
                 for fld in fields(PipelineConfig)}
    config = load_config(args.config, overrides)

    if args.command == 'bench':
        cmd_bench(args.input, args.out, config)
        return 0

    if args.command == 'compare':
        cmd_compare(args.input, args.truth, args.out, config)
        return 0

    if args.command == 'preprocess':
        def _func(src, dst):
            cmd_preprocess(src, dst, config, args.dump_stages)
    elif args.command == 'cluster':
        def _func(src, dst):
            cmd_cluster(src, dst, config)
    else:
        def _func(src, dst):
            cmd_extract(src, dst, config, args.debug)

    return _run_batch(args.input, args.out, _func, args.jobs)


def _run_batch(in_path, out_path, func, jobs):
    '''Runs func on a file, or on every image under a directory.'''
    if not os.path.isdir(in_path):
        func(in_path, out_path)
        return 0

    pairs = []

    for path, _, filenames in os.walk(in_path):
        for filename in sorted(filenames):
            if filename.lower().endswith(_IMAGE_EXTS):
                rel = os.path.relpath(os.path.join(path, filename), in_path)
                pairs.append((os.path.join(path, filename),
                              os.path.join(out_path,
                                           os.path.splitext(rel)[0] +
                                           '.pgm')))

    def _safe(pair):
        try:
            func(*pair)
            return True
        except (OSError, ValueError) as err:
            _LOGGER.error('%s: %s', pair[0], err)
            return False

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        results = list(executor.map(_safe, pairs))

    _LOGGER.info('Processed %d of %d images', sum(results), len(results))
    return 0 if all(results) else 1


def _write_report(result, table, out_path):
    '''Writes <stem>.json and <stem>.csv.'''
    stem = _stem(out_path)
    out_dir = os.path.dirname(stem)

    if out_dir and not os.path.exists(out_dir):
        os.makedirs(out_dir)

    with open(stem + '.json', 'w', encoding='utf-8') as fle:
        json.dump(_jsonable(result), fle, indent=2)

    table.to_csv(stem + '.csv', index=False)


def _quality_dict(qual):
    '''QualityReport with non-finite values flagged.'''
    return {'mse': qual.mse,
            'psnr': qual.psnr,
            'psnr_infinite': qual.psnr_infinite,
            'snr': qual.snr,
            'snr_degenerate': qual.snr_degenerate}


def _jsonable(value):
    '''Replaces numpy scalars and non-finite floats.'''
    if isinstance(value, dict):
        return {key: _jsonable(val) for key, val in value.items()}

    if isinstance(value, (list, tuple)):
        return [_jsonable(val) for val in value]

    if isinstance(value, np.generic):
        value = value.item()

    if isinstance(value, float) and not math.isfinite(value):
        return None

    return value


def _stem(path):
    '''Path without its extension.'''
    return os.path.splitext(path)[0]


def _get_parser():
    '''Get parser.'''
    parser = ArgumentParser(prog='liv_vein',
                            description='Finger-vein pattern extraction')
    parser.add_argument('--verbose', action='store_true')
    subparsers = parser.add_subparsers(dest='command')

    config_parser = ArgumentParser(add_help=False)
    config_parser.add_argument('--config', default=None,
                               help='key = value config file')

    for fld in fields(PipelineConfig):
        kwargs = {'dest': fld.name, 'default': None,
                  'help': 'default %r' % fld.default}

        if fld.name == 'algo':
            kwargs['choices'] = ALGORITHMS

        config_parser.add_argument('--' + fld.name.replace('_', '-'),
                                   **kwargs)

    batch_parser = ArgumentParser(add_help=False)
    batch_parser.add_argument('--jobs', type=int, default=1)

    sub = subparsers.add_parser('preprocess',
                                parents=[config_parser, batch_parser])
    sub.add_argument('input')
    sub.add_argument('out')
    sub.add_argument('--dump-stages', action='store_true')

    sub = subparsers.add_parser('cluster',
                                parents=[config_parser, batch_parser])
    sub.add_argument('input')
    sub.add_argument('out')

    sub = subparsers.add_parser('extract',
                                parents=[config_parser, batch_parser])
    sub.add_argument('input')
    sub.add_argument('out')
    sub.add_argument('--debug', action='store_true')

    sub = subparsers.add_parser('eval')
    sub.add_argument('pred')
    sub.add_argument('truth')
    sub.add_argument('out')
    sub.add_argument('--quality', nargs=2, metavar=('REFERENCE', 'IMAGE'))

    sub = subparsers.add_parser('bench', parents=[config_parser])
    sub.add_argument('input')
    sub.add_argument('out')

    sub = subparsers.add_parser('compare', parents=[config_parser])
    sub.add_argument('input')
    sub.add_argument('truth')
    sub.add_argument('out')

    spec = synth.PhantomSpec()
    sub = subparsers.add_parser('synth')
    sub.add_argument('out')
    sub.add_argument('--seed', type=int, default=spec.seed)
    sub.add_argument('--width', type=int, default=spec.width)
    sub.add_argument('--height', type=int, default=spec.height)
    sub.add_argument('--vein-count', type=int, default=spec.vein_count)
    sub.add_argument('--vein-width-min', type=float,
                     default=spec.vein_width_range[0])
    sub.add_argument('--vein-width-max', type=float,
                     default=spec.vein_width_range[1])
    sub.add_argument('--background', type=float,
                     default=spec.background_level)
    sub.add_argument('--depth', type=float, default=spec.vein_depth)
    sub.add_argument('--noise', type=float, default=spec.noise_sigma)
    sub.add_argument('--blur', type=float, default=spec.blur_sigma)

    return parser


if __name__ == '__main__':
    sys.exit(main())
