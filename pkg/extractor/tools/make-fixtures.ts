/** Regenerates the contract fixtures consumed by the analysis toolkit's
 * test suite: a 1 s tone extracted with a tiny random checkpoint, plus a
 * syllabified phone alignment.
 *
 *   npm run build && node dist/tools/make-fixtures.js ../tests/fixtures/secondary
 */

import { mkdirSync, writeFileSync } from 'node:fs'
import { join } from 'node:path'

import { encodeAlignment } from '../src/alignment.js'
import { defaultRulesPath } from '../src/cli.js'
import { parseCheckpoint } from '../src/checkpoint.js'
import { extractEmbeddings } from '../src/extractor.js'
import { loadRuleTable, parsePhoneFile, syllabify } from '../src/syllabify.js'
import { encodeWavPcm16 } from '../src/wav.js'

const outDir = process.argv[2]
if (!outDir) {
	console.error('usage: node make-fixtures.js OUT_DIR')
	process.exit(1)
}
mkdirSync(outDir, { recursive: true })

// deterministic LCG so the fixture never drifts
let state = 20240917
const next = () => {
	state = (state * 1103515245 + 12345) % 2147483648
	return state / 2147483648 - 0.5
}

const inputDim = 16
const hidden = 8
const checkpoint = {
	modelId: 'tiny-random-fixture',
	sampleRateHz: 16000,
	frameRateHz: 50,
	windowSamples: 400,
	inputDim,
	layers: [
		{
			rows: hidden,
			cols: inputDim,
			weights: Array.from({ length: hidden * inputDim }, next),
			bias: Array.from({ length: hidden }, next),
		},
	],
}
writeFileSync(join(outDir, 'tiny_checkpoint.json'), JSON.stringify(checkpoint, null, 1))

const sampleRateHz = 16000
const durationSec = 1.0
const n = Math.round(durationSec * sampleRateHz)
const samples = new Float64Array(n)
for (let i = 0; i < n; i++) {
	// two-band chirp with a quiet middle, roughly speech-shaped energy
	const t = i / sampleRateHz
	const envelope = t < 0.45 ? 1.0 : t < 0.55 ? 0.05 : 0.8
	samples[i] = 0.4 * envelope * Math.sin(2 * Math.PI * (180 + 120 * t) * t)
}
const wavPath = join(outDir, 'fixture_utt.wav')
writeFileSync(wavPath, encodeWavPcm16(samples, sampleRateHz))

const outcomes = extractEmbeddings(
	parseCheckpoint(JSON.stringify(checkpoint)), 1, [wavPath], outDir)
for (const outcome of outcomes) {
	if (outcome.error) {
		throw new Error(outcome.error)
	}
	console.log(`${outcome.outputPath}: ${outcome.nFrames} frames`)
}

const phoneText = [
	'0.00\t0.12\tHH',
	'0.12\t0.25\tEH1',
	'0.25\t0.33\tL',
	'0.33\t0.45\tOW0',
	'0.45\t0.55\tsil',
	'0.55\t0.66\tW',
	'0.66\t0.82\tER1',
	'0.82\t0.93\tL',
	'0.93\t1.00\tD',
].join('\n') + '\n'
writeFileSync(join(outDir, 'fixture_utt.phones.tsv'), phoneText)
const syllables = syllabify(parsePhoneFile(phoneText), loadRuleTable(defaultRulesPath()))
writeFileSync(join(outDir, 'fixture_utt.ali'), encodeAlignment(syllables))
console.log(`${join(outDir, 'fixture_utt.ali')}: ${syllables.length} syllables`)
