/** Frame-level embedding extraction: WAV in, SYLF out. */

import { readFileSync, writeFileSync, mkdirSync } from 'node:fs'
import { basename, extname, join } from 'node:path'

import { Checkpoint, CheckpointError, layerOutputDim } from './checkpoint.js'
import { FrameMatrix, encodeSylf } from './sylf.js'
import { decodeWav } from './wav.js'

export class ExtractionError extends Error {}

/** Centered analysis windows at hop = sampleRate / frameRate; zero padding
 * at the edges keeps nFrames = round(nSamples / hop). */
export function frameCount(nSamples: number, hop: number): number {
	return Math.round(nSamples / hop)
}

function windowAt(samples: Float64Array, center: number, width: number): Float64Array {
	const out = new Float64Array(width)
	const start = center - Math.floor(width / 2)
	for (let i = 0; i < width; i++) {
		const index = start + i
		out[i] = index >= 0 && index < samples.length ? samples[index] : 0
	}
	return out
}

/** Average the window into `inputDim` equal bins. */
export function binnedFeatures(window: Float64Array, inputDim: number): Float64Array {
	const out = new Float64Array(inputDim)
	const binSize = window.length / inputDim
	for (let b = 0; b < inputDim; b++) {
		const start = Math.floor(b * binSize)
		const end = Math.max(start + 1, Math.floor((b + 1) * binSize))
		let sum = 0
		for (let i = start; i < end; i++) {
			sum += window[i]
		}
		out[b] = sum / (end - start)
	}
	return out
}

function applyLayers(features: Float64Array, checkpoint: Checkpoint, layerIndex: number): Float64Array {
	let current = features
	for (let k = 0; k < layerIndex; k++) {
		const { rows, cols, weights, bias } = checkpoint.layers[k]
		const next = new Float64Array(rows)
		for (let r = 0; r < rows; r++) {
			let sum = bias[r]
			for (let c = 0; c < cols; c++) {
				sum += weights[r * cols + c] * current[c]
			}
			next[r] = Math.tanh(sum)
		}
		current = next
	}
	return current
}

export function extractFrames(samples: Float64Array, sampleRateHz: number,
	checkpoint: Checkpoint, layerIndex: number): FrameMatrix {
	if (sampleRateHz !== checkpoint.sampleRateHz) {
		throw new ExtractionError(
			`audio sample rate ${sampleRateHz} != checkpoint rate ${checkpoint.sampleRateHz}`)
	}
	const dim = layerOutputDim(checkpoint, layerIndex)
	const hop = checkpoint.sampleRateHz / checkpoint.frameRateHz
	const nFrames = frameCount(samples.length, hop)
	const data = new Float32Array(nFrames * dim)
	for (let t = 0; t < nFrames; t++) {
		const center = Math.round((t + 0.5) * hop)
		const window = windowAt(samples, center, checkpoint.windowSamples)
		const features = applyLayers(binnedFeatures(window, checkpoint.inputDim), checkpoint, layerIndex)
		for (let d = 0; d < dim; d++) {
			const value = features[d]
			if (!Number.isFinite(value)) {
				throw new ExtractionError(`non-finite feature at frame ${t}`)
			}
			data[t * dim + d] = value
		}
	}
	return { dim, nFrames, frameRateHz: checkpoint.frameRateHz, data }
}

export interface ExtractionOutcome {
	audioPath: string
	outputPath?: string
	nFrames?: number
	error?: string
}

/** Extract one SYLF per audio file; per-file failures are reported and the
 * run continues. The layer index is validated up front (usage error). */
export function extractEmbeddings(checkpoint: Checkpoint, layerIndex: number,
	audioPaths: string[], outputDir: string): ExtractionOutcome[] {
	layerOutputDim(checkpoint, layerIndex) // throws CheckpointError if out of range
	mkdirSync(outputDir, { recursive: true })
	const outcomes: ExtractionOutcome[] = []
	for (const audioPath of audioPaths) {
		try {
			const audio = decodeWav(readFileSync(audioPath))
			const frames = extractFrames(audio.samples, audio.sampleRateHz, checkpoint, layerIndex)
			const stem = basename(audioPath, extname(audioPath))
			const outputPath = join(outputDir, `${stem}.sylf`)
			writeFileSync(outputPath, encodeSylf(frames))
			outcomes.push({ audioPath, outputPath, nFrames: frames.nFrames })
		} catch (error) {
			if (error instanceof CheckpointError) {
				throw error
			}
			outcomes.push({ audioPath, error: String(error) })
		}
	}
	return outcomes
}
