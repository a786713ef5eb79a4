import assert from 'node:assert/strict'
import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { test } from 'node:test'

import { Checkpoint, CheckpointError, parseCheckpoint } from '../src/checkpoint.js'
import { extractEmbeddings, extractFrames, frameCount } from '../src/extractor.js'
import { decodeSylf } from '../src/sylf.js'
import { decodeWav, encodeWavPcm16, WavDecodeError } from '../src/wav.js'

function tinyCheckpoint(seed = 1234): Checkpoint {
	// deterministic pseudo-random weights, no training implied
	let state = seed
	const next = () => {
		state = (state * 1103515245 + 12345) % 2147483648
		return state / 2147483648 - 0.5
	}
	const inputDim = 16
	const hidden = 8
	return parseCheckpoint(JSON.stringify({
		modelId: 'tiny-random',
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
			{
				rows: 4,
				cols: hidden,
				weights: Array.from({ length: 4 * hidden }, next),
				bias: Array.from({ length: 4 }, next),
			},
		],
	}))
}

function toneWav(durationSec: number, sampleRateHz = 16000): Buffer {
	const n = Math.round(durationSec * sampleRateHz)
	const samples = new Float64Array(n)
	for (let i = 0; i < n; i++) {
		samples[i] = 0.5 * Math.sin((2 * Math.PI * 220 * i) / sampleRateHz)
	}
	return encodeWavPcm16(samples, sampleRateHz)
}

test('wav codec round trip', () => {
	const buffer = toneWav(0.1)
	const audio = decodeWav(buffer)
	assert.equal(audio.sampleRateHz, 16000)
	assert.equal(audio.samples.length, 1600)
	assert.throws(() => decodeWav(Buffer.from('definitely not audio data')), WavDecodeError)
})

test('one second of audio yields about frame-rate frames', () => {
	const checkpoint = tinyCheckpoint()
	const audio = decodeWav(toneWav(1.0))
	const frames = extractFrames(audio.samples, audio.sampleRateHz, checkpoint, 2)
	assert.ok(Math.abs(frames.nFrames - 50) <= 1, `got ${frames.nFrames} frames`)
	assert.equal(frames.dim, 4)
	assert.equal(frames.frameRateHz, 50)
	for (const value of frames.data) {
		assert.ok(Number.isFinite(value))
	}
})

test('frame count tracks duration times rate within one frame', () => {
	for (const seconds of [0.2, 0.5, 1.0, 2.3]) {
		const nSamples = Math.round(seconds * 16000)
		const got = frameCount(nSamples, 320)
		assert.ok(Math.abs(got - seconds * 50) <= 1)
	}
})

test('layer index selects dimensionality; out of range is a usage error', () => {
	const checkpoint = tinyCheckpoint()
	const audio = decodeWav(toneWav(0.2))
	assert.equal(extractFrames(audio.samples, 16000, checkpoint, 0).dim, 16)
	assert.equal(extractFrames(audio.samples, 16000, checkpoint, 1).dim, 8)
	assert.equal(extractFrames(audio.samples, 16000, checkpoint, 2).dim, 4)
	assert.throws(() => extractFrames(audio.samples, 16000, checkpoint, 3), CheckpointError)
	assert.throws(() => extractEmbeddings(checkpoint, 7, [], 'unused'), CheckpointError)
})

test('sample-rate mismatch is rejected', () => {
	const checkpoint = tinyCheckpoint()
	assert.throws(() => extractFrames(new Float64Array(800), 8000, checkpoint, 1))
})

test('batch extraction continues past unreadable audio', () => {
	const dir = mkdtempSync(join(tmpdir(), 'sylkit-extract-'))
	const good = join(dir, 'good.wav')
	const bad = join(dir, 'bad.wav')
	writeFileSync(good, toneWav(0.5))
	writeFileSync(bad, Buffer.from('garbage'))
	const outDir = join(dir, 'out')
	const outcomes = extractEmbeddings(tinyCheckpoint(), 1, [good, bad], outDir)
	assert.equal(outcomes.length, 2)
	assert.ok(outcomes[0].outputPath)
	assert.ok(outcomes[1].error)
	const decoded = decodeSylf(readFileSync(outcomes[0].outputPath!))
	assert.equal(decoded.dim, 8)
	assert.ok(Math.abs(decoded.nFrames - 25) <= 1)
})

test('extraction is deterministic for fixed checkpoint and audio', () => {
	const checkpoint = tinyCheckpoint()
	const audio = decodeWav(toneWav(0.3))
	const a = extractFrames(audio.samples, 16000, checkpoint, 2)
	const b = extractFrames(audio.samples, 16000, checkpoint, 2)
	assert.deepEqual(Array.from(a.data), Array.from(b.data))
})
